#include "fuselage/runtime.hpp"
#include "fuselage/wire.hpp"

#include <algorithm>

namespace fuselage {

using json = nlohmann::json;

SaveState save(const Session& s)
{
    SaveState out;
    out.story_hash = content_hash(*s.graph);
    out.node = s.current;
    out.flags = s.flags;
    out.inventory = s.inventory;
    out.meters = s.meters;
    out.page = s.page;
    out.mini = s.mini;
    out.seed = s.seed;
    out.event_count = s.event_count;
    out.finished = s.finished;
    return out;
}

namespace {

[[noreturn]] void bad(const std::string& why)
{
    throw MalformedSave("malformed save: " + why);
}

void check_mini(const Node& node, const std::optional<MiniState>& mini, bool finished)
{
    const auto* mg = std::get_if<MiniGameBody>(&node.body);
    if (!mg || finished) {
        if (mini)
            bad("mini-game state present outside a mini-game");
        return;
    }
    if (!mini || mini->index() != mg->params.index())
        bad("mini-game state does not match node '" + node.id + "'");

    if (const auto* p = std::get_if<BiolinkParams>(&mg->params)) {
        const auto& st = std::get<BiolinkState>(*mini);
        if (!p->in_bounds(st.position) || p->at(st.position) == '#')
            bad("biolink position out of bounds");
        for (const auto& c : st.collected)
            if (p->at(c) != 'T')
                bad("collected cell is not trash");
    } else if (const auto* p = std::get_if<ScanParams>(&mg->params)) {
        const auto& st = std::get<ScanState>(*mini);
        for (const auto& c : st.revealed)
            if (!p->in_bounds(c))
                bad("revealed cell out of bounds");
        if (st.scans_used != static_cast<std::int64_t>(st.revealed.size()))
            bad("scans_used does not match revealed cells");
    } else if (const auto* p = std::get_if<CoordParams>(&mg->params)) {
        const auto& st = std::get<CoordState>(*mini);
        if (st.attempts_used < 0 || (p->max_attempts && st.attempts_used >= *p->max_attempts))
            bad("coord attempts out of range");
        if (st.buffer.size() > kCoordBufferCap || !std::all_of(st.buffer.begin(), st.buffer.end(), is_keypad_symbol))
            bad("coord buffer invalid");
    } else if (const auto* p = std::get_if<SequenceParams>(&mg->params)) {
        const auto& st = std::get<SequenceState>(*mini);
        if (st.next_step < 0 || st.next_step >= static_cast<std::int64_t>(p->steps.size()))
            bad("sequence step out of range");
    }
}

} // namespace

Session restore(std::shared_ptr<const StoryGraph> graph, const SaveState& st)
{
    if (st.version != kSaveFormatVersion)
        throw UnsupportedVersion("unsupported save version " + std::to_string(st.version));
    if (st.story_hash != content_hash(*graph))
        throw HashMismatch("save was made for a different story (hash mismatch)");

    const Node* node = graph->find(st.node);
    if (!node)
        bad("unknown node '" + st.node + "'");
    for (const auto& f : st.flags)
        if (std::find(graph->flags.begin(), graph->flags.end(), f) == graph->flags.end())
            bad("undeclared flag '" + f + "'");
    for (const auto& [item, count] : st.inventory) {
        bool declared = std::any_of(graph->items.begin(), graph->items.end(), [&](const ItemDef& d) { return d.name == item; });
        if (!declared || count <= 0)
            bad("bad inventory entry '" + item + "'");
    }
    if (st.meters.size() != graph->meters.size())
        bad("meter set does not match the story");
    for (const auto& m : graph->meters) {
        auto it = st.meters.find(m.name);
        if (it == st.meters.end() || it->second < m.min || it->second > m.max)
            bad("meter '" + m.name + "' missing or out of range");
    }
    std::int64_t pages = 1;
    if (const auto* nar = std::get_if<NarrationBody>(&node->body))
        pages = static_cast<std::int64_t>(nar->pages.size());
    if (st.page < 0 || st.page >= pages)
        bad("page out of range");
    if (st.finished && (node->kind() != NodeKind::Ending || *st.finished != node->id))
        bad("finished does not match the current node");
    check_mini(*node, st.mini, st.finished.has_value());

    Session s;
    s.graph = std::move(graph);
    s.current = st.node;
    s.flags = st.flags;
    s.inventory = st.inventory;
    s.meters = st.meters;
    s.page = st.page;
    s.mini = st.mini;
    s.seed = st.seed;
    s.event_count = st.event_count;
    s.finished = st.finished;
    return s;
}

std::string encode_save(const SaveState& st)
{
    json j;
    j["version"] = st.version;
    j["story_hash"] = st.story_hash;
    j["node"] = st.node;
    j["flags"] = st.flags;
    json inv = json::array();
    for (const auto& [item, count] : st.inventory)
        for (std::int64_t i = 0; i < count; ++i)
            inv.push_back(item);
    j["inventory"] = inv;
    j["meters"] = json::object();
    for (const auto& [name, value] : st.meters)
        j["meters"][name] = value;
    j["page"] = st.page;
    j["mini"] = wire::mini_state_to_json(st.mini);
    j["seed"] = st.seed;
    j["event_count"] = st.event_count;
    j["finished"] = st.finished ? json(*st.finished) : json(nullptr);
    return j.dump() + "\n";
}

SaveState decode_save(std::string_view bytes)
{
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error&) {
        bad("not valid JSON");
    }
    if (!j.is_object())
        bad("expected an object");
    static const char* const keys[] = {"version", "story_hash", "node", "flags", "inventory", "meters",
        "page", "mini", "seed", "event_count", "finished"};
    for (const char* k : keys)
        if (!j.contains(k))
            bad(std::string("missing '") + k + "'");
    if (j.size() != std::size(keys))
        bad("unexpected keys");

    if (!j["version"].is_number_integer())
        bad("version must be an integer");
    SaveState st;
    st.version = j["version"].get<std::int64_t>();
    if (st.version != kSaveFormatVersion)
        throw UnsupportedVersion("unsupported save version " + std::to_string(st.version));

    auto str = [&](const json& v, const char* what) {
        if (!v.is_string())
            bad(std::string(what) + " must be a string");
        return v.get<std::string>();
    };
    auto integer = [&](const json& v, const char* what) {
        if (!v.is_number_integer())
            bad(std::string(what) + " must be an integer");
        return v.get<std::int64_t>();
    };
    auto unsigned_integer = [&](const json& v, const char* what) {
        if (!v.is_number_unsigned())
            bad(std::string(what) + " must be a non-negative integer");
        return v.get<std::uint64_t>();
    };

    st.story_hash = str(j["story_hash"], "story_hash");
    if (st.story_hash.size() != 64)
        bad("story_hash must be 64 hex characters");
    st.node = str(j["node"], "node");
    if (!j["flags"].is_array())
        bad("flags must be an array");
    for (const auto& f : j["flags"])
        st.flags.insert(str(f, "flag"));
    if (!j["inventory"].is_array())
        bad("inventory must be an array");
    for (const auto& i : j["inventory"])
        ++st.inventory[str(i, "inventory item")];
    if (!j["meters"].is_object())
        bad("meters must be an object");
    for (const auto& [k, v] : j["meters"].items())
        st.meters[k] = integer(v, "meter value");
    st.page = integer(j["page"], "page");
    try {
        st.mini = wire::mini_state_from_json(j["mini"]);
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
    st.seed = unsigned_integer(j["seed"], "seed");
    st.event_count = unsigned_integer(j["event_count"], "event_count");
    if (!j["finished"].is_null())
        st.finished = str(j["finished"], "finished");
    return st;
}

} // namespace fuselage
