#include "fuselage/wire.hpp"

namespace fuselage::wire {

namespace {

json cell(Cell c)
{
    return json::array({c.x, c.y});
}

std::int64_t int_field(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer())
        throw MalformedEvent(std::string("'") + key + "' must be an integer");
    return it->get<std::int64_t>();
}

std::string string_field(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw MalformedEvent(std::string("'") + key + "' must be a string");
    return it->get<std::string>();
}

Cell cell_from(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw std::invalid_argument("cell must be [x, y]");
    return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
}

} // namespace

std::string_view to_string(MiniAction::Kind k)
{
    switch (k) {
    case MiniAction::Kind::MoveN: return "move-n";
    case MiniAction::Kind::MoveS: return "move-s";
    case MiniAction::Kind::MoveE: return "move-e";
    case MiniAction::Kind::MoveW: return "move-w";
    case MiniAction::Kind::Grab: return "grab";
    case MiniAction::Kind::Wait: return "wait";
    case MiniAction::Kind::Scan: return "scan";
    case MiniAction::Kind::Submit: return "submit";
    case MiniAction::Kind::Backspace: return "backspace";
    case MiniAction::Kind::Do: return "do";
    }
    return "?";
}

std::optional<MiniAction::Kind> mini_action_from_string(std::string_view s)
{
    for (auto k : {MiniAction::Kind::MoveN, MiniAction::Kind::MoveS, MiniAction::Kind::MoveE, MiniAction::Kind::MoveW,
             MiniAction::Kind::Grab, MiniAction::Kind::Wait, MiniAction::Kind::Scan, MiniAction::Kind::Submit,
             MiniAction::Kind::Backspace, MiniAction::Kind::Do})
        if (to_string(k) == s)
            return k;
    return std::nullopt;
}

Event event_from_json(const json& j)
{
    if (!j.is_object())
        throw MalformedEvent("event must be a JSON object");
    Event e;
    std::string channel = string_field(j, "channel");
    if (channel == "touch")
        e.channel = Channel::Touch;
    else if (channel == "handset")
        e.channel = Channel::Handset;
    else
        throw MalformedEvent("channel must be \"touch\" or \"handset\"");

    std::string type = string_field(j, "type");
    if (type == "advance") {
        e.payload = Advance{};
    } else if (type == "ack") {
        e.payload = Ack{};
    } else if (type == "choose") {
        e.payload = Choose{int_field(j, "index")};
    } else if (type == "key") {
        std::string sym = string_field(j, "symbol");
        if (sym.empty())
            throw MalformedEvent("'symbol' must not be empty");
        e.payload = Key{sym};
    } else if (type == "mini") {
        auto kind = mini_action_from_string(string_field(j, "action"));
        if (!kind)
            throw MalformedEvent("unknown mini action");
        MiniAction a;
        a.kind = *kind;
        if (a.kind == MiniAction::Kind::Scan)
            a.cell = {int_field(j, "x"), int_field(j, "y")};
        if (a.kind == MiniAction::Kind::Do)
            a.step = string_field(j, "step");
        e.payload = std::move(a);
    } else {
        throw MalformedEvent("unknown event type '" + type + "'");
    }
    return e;
}

json event_to_json(const Event& e)
{
    json j;
    j["channel"] = e.channel == Channel::Handset ? "handset" : "touch";
    std::visit([&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Advance>) {
            j["type"] = "advance";
        } else if constexpr (std::is_same_v<T, Ack>) {
            j["type"] = "ack";
        } else if constexpr (std::is_same_v<T, Choose>) {
            j["type"] = "choose";
            j["index"] = p.index;
        } else if constexpr (std::is_same_v<T, Key>) {
            j["type"] = "key";
            j["symbol"] = p.symbol;
        } else {
            j["type"] = "mini";
            j["action"] = std::string(to_string(p.kind));
            if (p.kind == MiniAction::Kind::Scan) {
                j["x"] = p.cell.x;
                j["y"] = p.cell.y;
            }
            if (p.kind == MiniAction::Kind::Do)
                j["step"] = p.step;
        }
    }, e.payload);
    return j;
}

json notes_to_json(const std::vector<EngineNote>& notes)
{
    json out = json::array();
    for (const auto& n : notes)
        out.push_back({{"code", n.code}, {"message", n.message}});
    return out;
}

json view_to_json(const View& v)
{
    json j;
    j["node"] = v.node;
    j["kind"] = std::string(to_string(v.kind));
    j["game"] = v.game ? json(std::string(to_string(*v.game))) : json(nullptr);
    j["text"] = v.text;
    j["page"] = v.page;
    j["page_count"] = v.page_count;
    j["options"] = json::array();
    for (const auto& o : v.options)
        j["options"].push_back({{"index", o.index}, {"original_index", o.original_index}, {"label", o.label}});
    j["channels"] = json::array();
    for (auto c : v.channels)
        j["channels"].push_back(std::string(to_string(c)));
    j["meters"] = json::array();
    for (const auto& m : v.meters)
        j["meters"].push_back({{"name", m.name}, {"value", m.value}, {"min", m.min}, {"max", m.max}});
    j["finished"] = v.finished ? json(*v.finished) : json(nullptr);
    j["ending"] = v.ending ? json(std::string(to_string(*v.ending))) : json(nullptr);

    if (!v.mini) {
        j["mini"] = nullptr;
        return j;
    }
    j["mini"] = std::visit([](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BiolinkView>) {
            json tiles = json::array();
            for (const auto& t : m.tiles)
                tiles.push_back({{"x", t.cell.x}, {"y", t.cell.y}, {"tile", t.tile}});
            return {{"creature", m.creature}, {"meter", m.meter}, {"position", cell(m.position)},
                {"visibility", m.visibility}, {"tiles", tiles}, {"collected", m.collected}, {"required", m.required}};
        } else if constexpr (std::is_same_v<T, ScanView>) {
            json rev = json::array();
            for (const auto& r : m.revealed)
                rev.push_back({{"x", r.cell.x}, {"y", r.cell.y}, {"mark", r.mark}});
            return {{"width", m.width}, {"height", m.height}, {"revealed", rev}, {"scans_used", m.scans_used},
                {"budget", m.budget ? json(*m.budget) : json(nullptr)}};
        } else if constexpr (std::is_same_v<T, CoordView>) {
            return {{"buffer", m.buffer}, {"attempts_used", m.attempts_used},
                {"max_attempts", m.max_attempts ? json(*m.max_attempts) : json(nullptr)}};
        } else {
            return {{"completed", m.completed}, {"total", m.total}, {"steps", m.steps}};
        }
    }, *v.mini);
    return j;
}

json mini_state_to_json(const std::optional<MiniState>& mini)
{
    if (!mini)
        return json::object();
    return std::visit([](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BiolinkState>) {
            json collected = json::array();
            for (const auto& c : m.collected)
                collected.push_back(cell(c));
            return {{"kind", "biolink"}, {"position", cell(m.position)}, {"collected", collected}};
        } else if constexpr (std::is_same_v<T, ScanState>) {
            json revealed = json::array();
            for (const auto& c : m.revealed)
                revealed.push_back(cell(c));
            return {{"kind", "scan"}, {"revealed", revealed}, {"scans_used", m.scans_used}};
        } else if constexpr (std::is_same_v<T, CoordState>) {
            return {{"kind", "coord"}, {"attempts_used", m.attempts_used}, {"buffer", m.buffer}};
        } else {
            return {{"kind", "sequence"}, {"next_step", m.next_step}};
        }
    }, *mini);
}

// Throws std::invalid_argument on malformed input.
std::optional<MiniState> mini_state_from_json(const json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("mini must be an object");
    if (j.empty())
        return std::nullopt;
    auto need_int = [&](const char* k) {
        if (!j.contains(k) || !j[k].is_number_integer())
            throw std::invalid_argument(std::string("mini.") + k + " must be an integer");
        return j[k].get<std::int64_t>();
    };
    auto need_array = [&](const char* k) -> const json& {
        if (!j.contains(k) || !j[k].is_array())
            throw std::invalid_argument(std::string("mini.") + k + " must be an array");
        return j[k];
    };
    if (!j.contains("kind") || !j["kind"].is_string())
        throw std::invalid_argument("mini.kind missing");
    std::string kind = j["kind"].get<std::string>();
    std::size_t expected_keys = 0;
    MiniState out;
    if (kind == "biolink") {
        BiolinkState b;
        if (!j.contains("position"))
            throw std::invalid_argument("mini.position missing");
        b.position = cell_from(j["position"]);
        for (const auto& c : need_array("collected"))
            b.collected.insert(cell_from(c));
        out = std::move(b);
        expected_keys = 3;
    } else if (kind == "scan") {
        ScanState s;
        for (const auto& c : need_array("revealed"))
            s.revealed.insert(cell_from(c));
        s.scans_used = need_int("scans_used");
        out = std::move(s);
        expected_keys = 3;
    } else if (kind == "coord") {
        CoordState c;
        c.attempts_used = need_int("attempts_used");
        if (!j.contains("buffer") || !j["buffer"].is_string())
            throw std::invalid_argument("mini.buffer must be a string");
        c.buffer = j["buffer"].get<std::string>();
        out = std::move(c);
        expected_keys = 3;
    } else if (kind == "sequence") {
        out = SequenceState{need_int("next_step")};
        expected_keys = 2;
    } else {
        throw std::invalid_argument("unknown mini kind");
    }
    if (j.size() != expected_keys)
        throw std::invalid_argument("unexpected keys in mini");
    return out;
}

} // namespace fuselage::wire
