#include "doctest.h"

#include "fixtures.hpp"
#include "generators.hpp"

using namespace fuselage;
using namespace fuselage::testing;

namespace {

bool meters_in_range(const Session& s)
{
    for (const auto& m : s.graph->meters) {
        auto v = s.meters.at(m.name);
        if (v < m.min || v > m.max)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("replays are deterministic and meters stay in range")
{
    Rng rng(101);
    for (int i = 0; i < 100; ++i) {
        auto g = std::make_shared<const StoryGraph>(random_graph(rng));
        Session start = new_session(g, rng());
        auto events = random_run(rng, start, 120);
        Session a = start, b = start;
        for (const auto& e : events) {
            a = apply_event(a, e).session;
            CHECK(meters_in_range(a));
        }
        for (const auto& e : events)
            b = apply_event(b, e).session;
        CHECK(a == b);
    }
}

TEST_CASE("save round trips on random prefixes")
{
    Rng rng(102);
    for (int i = 0; i < 100; ++i) {
        auto g = std::make_shared<const StoryGraph>(random_graph(rng));
        Session s = new_session(g, rng());
        auto events = random_run(rng, s, 80);
        std::size_t cut = events.empty() ? 0 : rng() % (events.size() + 1);
        for (std::size_t k = 0; k < cut; ++k)
            s = apply_event(s, events[k]).session;
        std::string bytes = encode_save(save(s));
        CHECK(restore(g, decode_save(bytes)) == s);
    }
}

TEST_CASE("graph encoding round trips")
{
    Rng rng(103);
    for (int i = 0; i < 200; ++i) {
        StoryGraph g = random_graph(rng);
        std::string bytes = graph_encode(g);
        StoryGraph back = graph_decode(bytes);
        CHECK(back == g);
        CHECK(graph_encode(back) == bytes);
    }
}
