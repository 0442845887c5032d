#pragma once

#include "fuselage/story.hpp"

#include <optional>
#include <set>
#include <string>

// Brute-force reference implementations, written independently of the
// engine's own search code.
namespace fuselage::oracle {

// Explores every interleaving of story events from the start, treating
// mini-games as two-way branches and meter guards as passing.
std::set<std::string> reachable_nodes(const StoryGraph& g);

struct BiolinkEnumeration {
    std::optional<std::size_t> shortest_win; // in actions, if within the horizon
    std::optional<std::size_t> shortest_loss;
    bool alive_at_horizon = false;           // some sequence is still undecided
};

// Enumerates every action sequence up to `horizon` actions.
BiolinkEnumeration enumerate_biolink(const BiolinkParams& p, const MeterDef& m, std::int64_t start_meter, std::size_t horizon);

} // namespace fuselage::oracle
