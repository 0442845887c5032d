#pragma once

#include "fuselage/runtime.hpp"
#include "fuselage/story.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

namespace fuselage::testing {

using Rng = std::mt19937_64;

struct GraphShape {
    int max_nodes = 12;
    int max_flags = 4;
    int max_items = 3;
    bool minigames = true;
};

// A random graph that validates and passes the inventory abstraction check.
StoryGraph random_graph(Rng& rng, const GraphShape& shape = {});

// Random params over a grid of at most 4x4 with its meter definition.
struct BiolinkCase {
    BiolinkParams params;
    MeterDef meter;
};
BiolinkCase random_biolink(Rng& rng);

// A plausible event for the session's current node: usually the right
// payload kind and channel, sometimes not.
Event random_event(Rng& rng, const Session& s);

// Runs up to `length` random events, stopping once the session is finished.
std::vector<Event> random_run(Rng& rng, const Session& start, std::size_t length);

// Source text that compiles back to `g`.
std::string to_source(const StoryGraph& g);

} // namespace fuselage::testing
