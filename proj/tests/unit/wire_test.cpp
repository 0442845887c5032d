#include "doctest.h"

#include "fixtures.hpp"
#include "fuselage/wire.hpp"

using namespace fuselage;
using namespace fuselage::testing;
using nlohmann::json;

TEST_CASE("event json round trip")
{
    std::vector<Event> events = {
        touch(Advance{}), handset(Choose{2}), handset(Key{"N"}), touch(Ack{}),
        handset(scan_at(3, 1)), touch(step("read-log")),
    };
    for (auto k : kBiolinkActions)
        events.push_back(handset(to_mini_action(k)));
    events.push_back(handset(act(MiniAction::Kind::Submit)));
    events.push_back(handset(act(MiniAction::Kind::Backspace)));
    for (const auto& e : events) {
        json j = wire::event_to_json(e);
        CHECK(wire::event_from_json(j) == e);
        CHECK(wire::event_from_json(json::parse(j.dump())) == e);
    }
}

TEST_CASE("event json shape")
{
    json j = wire::event_to_json(handset(scan_at(3, 1)));
    CHECK(j == json{{"channel", "handset"}, {"type", "mini"}, {"action", "scan"}, {"x", 3}, {"y", 1}});
}

TEST_CASE("malformed events")
{
    const char* bad[] = {
        R"([])",
        R"({})",
        R"({"channel":"touch"})",
        R"({"channel":"any","type":"advance"})",
        R"({"channel":"touch","type":"fly"})",
        R"({"channel":"touch","type":"choose"})",
        R"({"channel":"touch","type":"choose","index":"1"})",
        R"({"channel":"touch","type":"key"})",
        R"({"channel":"touch","type":"mini","action":"jump"})",
        R"({"channel":"touch","type":"mini","action":"scan","x":1})",
        R"({"channel":"touch","type":"mini","action":"do"})",
    };
    for (const char* b : bad) {
        INFO(b);
        CHECK_THROWS_AS(wire::event_from_json(json::parse(b)), wire::MalformedEvent);
    }
}

TEST_CASE("view json carries node, kind and meters")
{
    json v = wire::view_to_json(view(new_session(mask_graph(), 0)));
    CHECK(v["node"] == "A-1");
    CHECK(v["kind"] == "narration");
    CHECK(v["meters"][0]["name"] == "freewill");
    CHECK(v["meters"][0]["value"] == 100);
}

TEST_CASE("mini state json round trip")
{
    std::vector<std::optional<MiniState>> states = {
        std::nullopt,
        MiniState{BiolinkState{{1, 2}, {{0, 0}, {3, 1}}}},
        MiniState{ScanState{{{1, 1}}, 1}},
        MiniState{CoordState{1, "N3 "}},
        MiniState{SequenceState{2}},
    };
    for (const auto& s : states)
        CHECK(wire::mini_state_from_json(wire::mini_state_to_json(s)) == s);
}
