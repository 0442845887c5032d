#include "doctest.h"

#include "fixtures.hpp"

using namespace fuselage;
using namespace fuselage::testing;

namespace {

Session mid_biolink()
{
    auto trace = analysis::trace_to(*mask_graph(), "C-2a");
    REQUIRE(trace);
    Session s = replay(new_session(mask_graph(), 11), *trace);
    REQUIRE(s.current == "C-2a");
    s = apply_event(s, handset(act(MiniAction::Kind::MoveE))).session;
    s = apply_event(s, handset(act(MiniAction::Kind::Wait))).session;
    return s;
}

} // namespace

TEST_CASE("save round trip in the middle of a biolink")
{
    Session s = mid_biolink();
    REQUIRE(s.mini);
    std::string bytes = encode_save(save(s));
    Session back = restore(mask_graph(), decode_save(bytes));
    CHECK(back == s);
    CHECK(encode_save(save(back)) == bytes);
    Event e = handset(act(MiniAction::Kind::MoveS));
    CHECK(apply_event(back, e).session == apply_event(s, e).session);
}

TEST_CASE("save bytes are canonical")
{
    std::string bytes = encode_save(save(new_session(mask_graph(), 0)));
    CHECK(bytes.back() == '\n');
    CHECK(bytes.find("\"finished\":null") != std::string::npos);
    CHECK(bytes.find("\"mini\":{}") != std::string::npos);
    CHECK(bytes.find(' ') == std::string::npos);
}

TEST_CASE("hash mismatch after editing the story")
{
    SaveState st = save(mid_biolink());
    auto edited = std::make_shared<StoryGraph>(*mask_graph());
    edited->title = "Rosetta-829";
    CHECK_THROWS_AS(restore(edited, st), HashMismatch);
    CHECK(st.story_hash == content_hash(*mask_graph()));
}

TEST_CASE("truncated and malformed saves")
{
    std::string bytes = encode_save(save(mid_biolink()));
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, bytes.size() / 2, bytes.size() - 2})
        CHECK_THROWS_AS(decode_save(bytes.substr(0, n)), MalformedSave);
    CHECK_THROWS_AS(decode_save("[]"), MalformedSave);
    CHECK_THROWS_AS(decode_save("{\"version\":1}"), MalformedSave);
}

TEST_CASE("restored state is checked against the graph")
{
    SaveState st = save(mid_biolink());
    SaveState bad = st;
    bad.node = "NOWHERE";
    CHECK_THROWS_AS(restore(mask_graph(), bad), MalformedSave);
    bad = st;
    bad.meters["freewill"] = 1000;
    CHECK_THROWS_AS(restore(mask_graph(), bad), MalformedSave);
    bad = st;
    bad.mini.reset();
    CHECK_THROWS_AS(restore(mask_graph(), bad), MalformedSave);
}

TEST_CASE("version mismatch")
{
    SaveState st = save(mid_biolink());
    st.version = 2;
    CHECK_THROWS_AS(restore(mask_graph(), st), UnsupportedVersion);
    std::string bytes = encode_save(st);
    CHECK_THROWS_AS(decode_save(bytes), UnsupportedVersion);
}
