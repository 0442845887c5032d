#include "doctest.h"

#include "fixtures.hpp"

using namespace fuselage;
using namespace fuselage::testing;

namespace {

BiolinkParams corridor()
{
    BiolinkParams p;
    p.creature = "c";
    p.meter = "m";
    p.grid = {"S.T", "###", "..."};
    p.command_cost = 5;
    p.idle_regen = 2;
    p.loss_threshold = 0;
    p.required_trash = 1;
    return p;
}

} // namespace

TEST_CASE("twenty moves drain a full meter")
{
    BiolinkParams p;
    p.grid = {"S" + std::string(25, '.')};
    p.meter = "m";
    p.required_trash = 0;
    MeterDef m{"m", 0, 100, 100};
    BiolinkState st{{0, 0}, {}};
    std::int64_t meter = 100;
    MiniOutcome last = MiniOutcome::Continue;
    int moves = 0;
    p.required_trash = 1;
    p.grid[0][24] = 'T';
    while (last == MiniOutcome::Continue) {
        auto s = biolink_update(p, st, meter, m, BiolinkAction::MoveE);
        st = s.state;
        meter = s.meter;
        last = s.outcome;
        ++moves;
    }
    CHECK(moves == 20);
    CHECK(meter == 0);
    CHECK(last == MiniOutcome::Failure);
}

TEST_CASE("grab on trash with one required wins")
{
    BiolinkParams p = corridor();
    MeterDef m{"m", 0, 100, 100};
    auto s = biolink_update(p, {{2, 0}, {}}, 50, m, BiolinkAction::Grab);
    CHECK(s.outcome == MiniOutcome::Success);
    CHECK(s.meter == 45);
    CHECK(s.state.collected.count({2, 0}) == 1);
    CHECK(has_note(s.notes, "collected"));
}

TEST_CASE("corridor example: rushing loses, waiting wins")
{
    BiolinkParams p = corridor();
    MeterDef m{"m", 0, 20, 12};
    auto run = [&](std::vector<BiolinkAction> acts) {
        BiolinkState st{{0, 0}, {}};
        std::int64_t meter = 12;
        MiniOutcome out = MiniOutcome::Continue;
        for (auto a : acts) {
            REQUIRE(out == MiniOutcome::Continue);
            auto s = biolink_update(p, st, meter, m, a);
            st = s.state;
            meter = s.meter;
            out = s.outcome;
        }
        return std::pair{out, meter};
    };
    using A = BiolinkAction;
    CHECK(run({A::MoveE, A::MoveE}).second == 2);
    CHECK(run({A::MoveE, A::MoveE, A::Grab}).first == MiniOutcome::Failure);
    auto win = run({A::MoveE, A::Wait, A::MoveE, A::Wait, A::Grab});
    CHECK(win.first == MiniOutcome::Success);
    CHECK(win.second == 1);
}

TEST_CASE("blocked moves still cost")
{
    BiolinkParams p = corridor();
    MeterDef m{"m", 0, 20, 12};
    auto s = biolink_update(p, {{0, 0}, {}}, 12, m, BiolinkAction::MoveS);
    CHECK(s.state.position == Cell{0, 0});
    CHECK(s.meter == 7);
    CHECK(has_note(s.notes, "blocked"));
    s = biolink_update(p, {{0, 0}, {}}, 12, m, BiolinkAction::MoveW);
    CHECK(has_note(s.notes, "blocked"));
}

TEST_CASE("wait regains and clamps")
{
    BiolinkParams p = corridor();
    MeterDef m{"m", 0, 13, 12};
    auto s = biolink_update(p, {{0, 0}, {}}, 12, m, BiolinkAction::Wait);
    CHECK(s.meter == 13);
    CHECK(s.outcome == MiniOutcome::Continue);
}

TEST_CASE("loss is checked before success")
{
    BiolinkParams p = corridor();
    MeterDef m{"m", 0, 20, 12};
    auto s = biolink_update(p, {{2, 0}, {}}, 5, m, BiolinkAction::Grab);
    CHECK(s.outcome == MiniOutcome::Failure);
}

TEST_CASE("scan rules")
{
    ScanParams p;
    p.width = 4;
    p.height = 3;
    p.target = {2, 1};
    p.decoys = {{0, 0}};
    p.budget = 3;
    CHECK(scan_update(p, {}, {2, 1}).outcome == MiniOutcome::Success);

    auto d = scan_update(p, {}, {0, 0});
    CHECK(d.outcome == MiniOutcome::Continue);
    CHECK(has_note(d.notes, "decoy"));

    ScanState st;
    for (Cell c : {Cell{0, 2}, Cell{1, 2}, Cell{2, 2}}) {
        auto s = scan_update(p, st, c);
        CHECK(s.outcome == MiniOutcome::Continue);
        st = s.state;
    }
    CHECK(st.scans_used == 3);
    CHECK(scan_update(p, st, {3, 2}).outcome == MiniOutcome::Failure);

    auto again = scan_update(p, st, {0, 2});
    CHECK_FALSE(again.accepted);
    CHECK(has_note(again.notes, "already-scanned"));
    CHECK(again.state == st);

    auto out = scan_update(p, st, {4, 0});
    CHECK_FALSE(out.accepted);
    CHECK(has_note(out.notes, "out-of-bounds"));
}

TEST_CASE("coord normalization")
{
    CHECK(normalize_coordinate("  n37.2   e126.9 ") == "N37.2 E126.9");
    CoordParams p{"N37.2 E126.9", std::nullopt};
    CoordState st{0, "n37.2   e126.9"};
    CHECK(coord_update(p, st, CoordInput::Submit).outcome == MiniOutcome::Success);
}

TEST_CASE("coord attempts and buffer")
{
    CoordParams p{"N1", 2};
    auto s = coord_update(p, {}, CoordInput::Key, "5");
    CHECK(s.state.buffer == "5");
    s = coord_update(p, s.state, CoordInput::Submit);
    CHECK(s.outcome == MiniOutcome::Continue);
    CHECK(s.state.attempts_used == 1);
    CHECK(s.state.buffer.empty());
    s = coord_update(p, s.state, CoordInput::Submit);
    CHECK(s.outcome == MiniOutcome::Failure);

    auto b = coord_update(p, {}, CoordInput::Backspace);
    CHECK(b.outcome == MiniOutcome::Continue);
    CHECK(b.state == CoordState{});

    auto bad = coord_update(p, {}, CoordInput::Key, "x");
    CHECK_FALSE(bad.accepted);
    CHECK(has_note(bad.notes, "bad-key"));

    CoordState full{0, std::string(kCoordBufferCap, '1')};
    auto f = coord_update(p, full, CoordInput::Key, "2");
    CHECK_FALSE(f.accepted);
    CHECK(f.state == full);
}

TEST_CASE("sequence rules")
{
    SequenceParams b2{{{"open-table", Channel::Touch}, {"take-usb", Channel::Touch},
        {"insert-usb", Channel::Touch}, {"run-driver", Channel::Touch}}};
    SequenceState st;
    MiniOutcome out = MiniOutcome::Continue;
    for (const auto& s : b2.steps) {
        auto r = sequence_update(b2, st, s.id, Channel::Touch);
        CHECK(r.accepted);
        st = r.state;
        out = r.outcome;
    }
    CHECK(out == MiniOutcome::Success);

    SequenceParams c4{{{"stabilize", Channel::Handset}, {"override", Channel::Touch}}};
    auto r = sequence_update(c4, {}, "stabilize", Channel::Handset);
    CHECK(r.outcome == MiniOutcome::Continue);
    CHECK(sequence_update(c4, r.state, "override", Channel::Touch).outcome == MiniOutcome::Success);

    auto wrong = sequence_update(c4, {}, "stabilize", Channel::Touch);
    CHECK_FALSE(wrong.accepted);
    CHECK(has_note(wrong.notes, "not-yet"));
    CHECK(wrong.state == SequenceState{});

    auto early = sequence_update(c4, {}, "override", Channel::Touch);
    CHECK(has_note(early.notes, "not-yet"));
    for (const auto& n : early.notes)
        CHECK(n.message.find("stabilize") == std::string::npos);

    auto unknown = sequence_update(c4, {}, "dance", Channel::Touch);
    CHECK_FALSE(unknown.accepted);
    CHECK(has_note(unknown.notes, "unknown-step"));
}
