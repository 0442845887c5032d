#include "doctest.h"

#include "fixtures.hpp"
#include "generators.hpp"

using namespace fuselage;
using namespace fuselage::testing;

TEST_CASE("mask compiles to 15 nodes with three endings")
{
    auto r = compile(mask_source(), "mask.story");
    CHECK(r.diagnostics.empty());
    REQUIRE(r.graph);
    const auto& g = *r.graph;
    CHECK(g.nodes.size() == 15);
    CHECK(g.start == "A-1");
    std::map<std::string, EndingKind> endings;
    for (const auto& [id, n] : g.nodes)
        if (const auto* e = std::get_if<EndingBody>(&n.body))
            endings[id] = e->kind;
    CHECK(endings == std::map<std::string, EndingKind>{
        {"END-MAIN", EndingKind::Main}, {"END-SUB-LEAVE", EndingKind::Sub}, {"END-SUB-STOP", EndingKind::Sub}});
    CHECK(graph_validate(g).empty());
}

TEST_CASE("channel defaults and explicit channels")
{
    const auto& g = *mask_graph();
    CHECK(g.at("A-2").channel == Channel::Touch);
    CHECK(g.at("C-1").channel == Channel::Handset);
    CHECK(g.at("C-2a").channel == Channel::Handset);
    CHECK(g.at("B-3").channel == Channel::Handset);
    CHECK(g.at("B-2").channel == Channel::Any);
    CHECK(g.at("C-4").channel == Channel::Any);
}

TEST_CASE("omitted biolink params take the documented defaults")
{
    auto r = compile("story \"t\" start A meter m min 0 max 10 init 10\n"
                     "node A minigame biolink { params { creature \"c\" meter m grid \"ST\" required-trash 1 } success -> E failure -> E }\n"
                     "node E ending main { text \"e\" }\n");
    REQUIRE(r.graph);
    const auto& p = std::get<BiolinkParams>(std::get<MiniGameBody>(r.graph->at("A").body).params);
    CHECK(p.command_cost == 5);
    CHECK(p.idle_regen == 2);
    CHECK(p.loss_threshold == 0);
    CHECK(p.visibility == 2);
}

TEST_CASE("ragged grid is rejected")
{
    auto r = compile("story \"t\" start A meter m min 0 max 10 init 10\n"
                     "node A minigame biolink { params { creature \"c\" meter m grid \"S.\" grid \"T\" required-trash 1 } success -> E failure -> E }\n"
                     "node E ending main { text \"e\" }\n");
    CHECK_FALSE(r.graph);
    CHECK(has_code(r.diagnostics, "biolink-grid-ragged"));
}

TEST_CASE("dangling target fails with one diagnostic")
{
    auto r = compile("story \"t\" start A node A narration { text \"x\" next Z-9 } node E ending main { text \"e\" }");
    CHECK_FALSE(r.graph);
    REQUIRE(error_count(r.diagnostics) == 1);
    CHECK(r.diagnostics[0].code == "unknown-target");
}

TEST_CASE("warnings do not block compilation")
{
    auto r = compile("story \"t\" start A node A ending main { text \"e\" } node B ending sub { text \"x\" }");
    CHECK(r.graph);
    CHECK(has_code(r.diagnostics, "unreachable-by-syntax"));
}

TEST_CASE("items given while held and also taken are rejected")
{
    auto r = compile("story \"t\" start A item k\n"
                     "node A narration { text \"x\" next B give k }\n"
                     "node B choice { prompt \"p\" option \"again\" -> A option \"drop\" -> E take k }\n"
                     "node E ending main { text \"e\" }\n");
    CHECK_FALSE(r.graph);
    CHECK(has_code(r.diagnostics, "item-multiplicity"));

    auto ok = compile("story \"t\" start A item k\n"
                      "node A narration { text \"x\" next B give k }\n"
                      "node B choice { prompt \"p\" option \"again\" -> A option \"on\" -> E }\n"
                      "node E ending main { text \"e\" }\n");
    CHECK(ok.graph);
}

TEST_CASE("compile is deterministic and lowering preserves node count")
{
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        StoryGraph g = random_graph(rng);
        std::string src = to_source(g);
        auto a = compile(src);
        auto b = compile(src);
        REQUIRE(a.graph);
        REQUIRE(b.graph);
        CHECK(graph_encode(*a.graph) == graph_encode(*b.graph));
        CHECK(*a.graph == g);
        CHECK(graph_validate(*a.graph).empty());
        CHECK(dsl::parse(src).ast->nodes.size() == a.graph->nodes.size());
    }
}
