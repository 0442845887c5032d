#include "fuselage/story.hpp"

#include "json.hpp"
#include <openssl/evp.h>

#include <array>
#include <set>

namespace fuselage {

using json = nlohmann::json;

namespace {

json effect_to_json(const Effect& e)
{
    switch (e.kind) {
    case Effect::Kind::SetFlag: return {{"op", "set"}, {"name", e.name}};
    case Effect::Kind::ClearFlag: return {{"op", "clear"}, {"name", e.name}};
    case Effect::Kind::GiveItem: return {{"op", "give"}, {"name", e.name}};
    case Effect::Kind::TakeItem: return {{"op", "take"}, {"name", e.name}};
    case Effect::Kind::MeterDelta: return {{"op", "meter"}, {"name", e.name}, {"delta", e.delta}};
    }
    return {};
}

json guard_to_json(const Guard& g)
{
    switch (g.kind) {
    case Guard::Kind::FlagSet: return {{"op", "flag"}, {"name", g.name}};
    case Guard::Kind::FlagClear: return {{"op", "not-flag"}, {"name", g.name}};
    case Guard::Kind::ItemHeld: return {{"op", "item"}, {"name", g.name}};
    case Guard::Kind::Meter:
        return {{"op", "meter"}, {"name", g.name}, {"cmp", std::string(to_string(g.cmp))}, {"value", g.value}};
    }
    return {};
}

json cell_to_json(Cell c)
{
    return json::array({c.x, c.y});
}

json params_to_json(const MiniGameParams& params)
{
    return std::visit([](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BiolinkParams>) {
            return {{"command_cost", p.command_cost}, {"creature", p.creature}, {"grid", p.grid},
                {"idle_regen", p.idle_regen}, {"loss_threshold", p.loss_threshold}, {"meter", p.meter},
                {"required_trash", p.required_trash}, {"visibility", p.visibility}};
        } else if constexpr (std::is_same_v<T, ScanParams>) {
            json j = {{"width", p.width}, {"height", p.height}, {"target", cell_to_json(p.target)}};
            j["decoys"] = json::array();
            for (const auto& d : p.decoys)
                j["decoys"].push_back(cell_to_json(d));
            if (p.budget)
                j["budget"] = *p.budget;
            return j;
        } else if constexpr (std::is_same_v<T, CoordParams>) {
            json j = {{"expected", p.expected}};
            if (p.max_attempts)
                j["max_attempts"] = *p.max_attempts;
            return j;
        } else {
            json steps = json::array();
            for (const auto& s : p.steps)
                steps.push_back({{"id", s.id}, {"channel", std::string(to_string(s.channel))}});
            return {{"steps", steps}};
        }
    }, params);
}

json node_to_json(const Node& node)
{
    json j;
    j["kind"] = std::string(to_string(node.kind()));
    j["channel"] = std::string(to_string(node.channel));
    std::visit([&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, NarrationBody>) {
            j["pages"] = b.pages;
            j["next"] = b.next;
            j["effects"] = json::array();
            for (const auto& e : b.effects)
                j["effects"].push_back(effect_to_json(e));
        } else if constexpr (std::is_same_v<T, ChoiceBody>) {
            j["prompt"] = b.prompt;
            j["options"] = json::array();
            for (const auto& o : b.options) {
                json oj = {{"label", o.label}, {"target", o.target}};
                oj["guards"] = json::array();
                for (const auto& g : o.guards)
                    oj["guards"].push_back(guard_to_json(g));
                oj["effects"] = json::array();
                for (const auto& e : o.effects)
                    oj["effects"].push_back(effect_to_json(e));
                j["options"].push_back(std::move(oj));
            }
        } else if constexpr (std::is_same_v<T, MiniGameBody>) {
            j["game"] = std::string(to_string(kind_of(b.params)));
            j["params"] = params_to_json(b.params);
            j["success"] = b.success;
            j["failure"] = b.failure;
        } else {
            j["ending"] = std::string(to_string(b.kind));
            j["text"] = b.text;
        }
    }, node.body);
    return j;
}

// Strict reader: every object must carry exactly the expected keys.
class Reader {
public:
    explicit Reader(const json& j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j_.is_object())
            fail("expected an object");
    }

    const json& get(const char* key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end())
            fail(std::string("missing key '") + key + "'");
        return *it;
    }

    const json* get_opt(const char* key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string str(const char* key) { return as_string(get(key), key); }
    std::int64_t integer(const char* key) { return as_int(get(key), key); }

    const json& array(const char* key)
    {
        const json& v = get(key);
        if (!v.is_array())
            fail(std::string("'") + key + "' must be an array");
        return v;
    }

    void done()
    {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k))
                fail("unexpected key '" + k + "'");
    }

    std::string as_string(const json& v, const char* what) const
    {
        if (!v.is_string())
            fail(std::string("'") + what + "' must be a string");
        return v.get<std::string>();
    }

    std::int64_t as_int(const json& v, const char* what) const
    {
        if (!v.is_number_integer())
            fail(std::string("'") + what + "' must be an integer");
        if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
            fail(std::string("'") + what + "' is out of range");
        return v.get<std::int64_t>();
    }

    [[noreturn]] void fail(const std::string& msg) const { throw MalformedInput(where_ + ": " + msg); }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

Effect effect_from_json(const json& j, const std::string& where)
{
    Reader r(j, where);
    Effect e;
    std::string op = r.str("op");
    e.name = r.str("name");
    if (op == "set") e.kind = Effect::Kind::SetFlag;
    else if (op == "clear") e.kind = Effect::Kind::ClearFlag;
    else if (op == "give") e.kind = Effect::Kind::GiveItem;
    else if (op == "take") e.kind = Effect::Kind::TakeItem;
    else if (op == "meter") {
        e.kind = Effect::Kind::MeterDelta;
        e.delta = r.integer("delta");
    } else
        r.fail("unknown effect op '" + op + "'");
    r.done();
    return e;
}

Guard guard_from_json(const json& j, const std::string& where)
{
    Reader r(j, where);
    Guard g;
    std::string op = r.str("op");
    g.name = r.str("name");
    if (op == "flag") g.kind = Guard::Kind::FlagSet;
    else if (op == "not-flag") g.kind = Guard::Kind::FlagClear;
    else if (op == "item") g.kind = Guard::Kind::ItemHeld;
    else if (op == "meter") {
        g.kind = Guard::Kind::Meter;
        auto cmp = cmp_from_string(r.str("cmp"));
        if (!cmp)
            r.fail("unknown comparison");
        g.cmp = *cmp;
        g.value = r.integer("value");
    } else
        r.fail("unknown guard op '" + op + "'");
    r.done();
    return g;
}

Cell cell_from_json(const json& j, const Reader& r, const char* what)
{
    if (!j.is_array() || j.size() != 2)
        r.fail(std::string("'") + what + "' must be an [x, y] pair");
    return {r.as_int(j[0], what), r.as_int(j[1], what)};
}

std::vector<std::string> strings_from_json(const json& arr, const Reader& r, const char* what)
{
    std::vector<std::string> out;
    for (const auto& v : arr)
        out.push_back(r.as_string(v, what));
    return out;
}

MiniGameParams params_from_json(const std::string& game, const json& j, const std::string& where)
{
    Reader r(j, where + ".params");
    auto kind = mini_kind_from_string(game);
    if (!kind)
        r.fail("unknown mini-game '" + game + "'");
    MiniGameParams out;
    switch (*kind) {
    case MiniKind::Biolink: {
        BiolinkParams p;
        p.command_cost = r.integer("command_cost");
        p.creature = r.str("creature");
        p.grid = strings_from_json(r.array("grid"), r, "grid");
        p.idle_regen = r.integer("idle_regen");
        p.loss_threshold = r.integer("loss_threshold");
        p.meter = r.str("meter");
        p.required_trash = r.integer("required_trash");
        p.visibility = r.integer("visibility");
        out = std::move(p);
        break;
    }
    case MiniKind::Scan: {
        ScanParams p;
        p.width = r.integer("width");
        p.height = r.integer("height");
        p.target = cell_from_json(r.get("target"), r, "target");
        for (const auto& d : r.array("decoys"))
            p.decoys.push_back(cell_from_json(d, r, "decoys"));
        if (const json* b = r.get_opt("budget"))
            p.budget = r.as_int(*b, "budget");
        out = std::move(p);
        break;
    }
    case MiniKind::Coord: {
        CoordParams p;
        p.expected = r.str("expected");
        if (const json* m = r.get_opt("max_attempts"))
            p.max_attempts = r.as_int(*m, "max_attempts");
        out = std::move(p);
        break;
    }
    case MiniKind::Sequence: {
        SequenceParams p;
        for (const auto& s : r.array("steps")) {
            Reader sr(s, where + ".params.steps");
            SequenceStep step;
            step.id = sr.str("id");
            auto ch = channel_from_string(sr.str("channel"));
            if (!ch)
                sr.fail("unknown channel");
            step.channel = *ch;
            sr.done();
            p.steps.push_back(std::move(step));
        }
        out = std::move(p);
        break;
    }
    }
    r.done();
    return out;
}

Node node_from_json(const std::string& id, const json& j)
{
    const std::string where = "nodes." + id;
    Reader r(j, where);
    Node n;
    n.id = id;
    auto ch = channel_from_string(r.str("channel"));
    if (!ch)
        r.fail("unknown channel");
    n.channel = *ch;
    std::string kind = r.str("kind");
    auto effects = [&](const json& arr) {
        std::vector<Effect> out;
        for (const auto& e : arr)
            out.push_back(effect_from_json(e, where));
        return out;
    };
    if (kind == "narration") {
        NarrationBody b;
        b.pages = strings_from_json(r.array("pages"), r, "pages");
        b.next = r.str("next");
        b.effects = effects(r.array("effects"));
        n.body = std::move(b);
    } else if (kind == "choice") {
        ChoiceBody b;
        b.prompt = r.str("prompt");
        for (const auto& oj : r.array("options")) {
            Reader orr(oj, where + ".options");
            Option o;
            o.label = orr.str("label");
            o.target = orr.str("target");
            for (const auto& g : orr.array("guards"))
                o.guards.push_back(guard_from_json(g, where));
            o.effects = effects(orr.array("effects"));
            orr.done();
            b.options.push_back(std::move(o));
        }
        n.body = std::move(b);
    } else if (kind == "minigame") {
        MiniGameBody b;
        std::string game = r.str("game");
        b.params = params_from_json(game, r.get("params"), where);
        b.success = r.str("success");
        b.failure = r.str("failure");
        n.body = std::move(b);
    } else if (kind == "ending") {
        EndingBody b;
        auto ek = ending_kind_from_string(r.str("ending"));
        if (!ek)
            r.fail("unknown ending kind");
        b.kind = *ek;
        b.text = r.str("text");
        n.body = std::move(b);
    } else {
        r.fail("unknown node kind '" + kind + "'");
    }
    r.done();
    return n;
}

} // namespace

std::string graph_encode(const StoryGraph& graph)
{
    auto diags = graph_validate(graph);
    if (!diags.empty())
        throw InvalidGraph(std::move(diags));

    json j;
    j["version"] = graph.version;
    j["title"] = graph.title;
    j["start"] = graph.start;
    j["meters"] = json::array();
    for (const auto& m : graph.meters)
        j["meters"].push_back({{"name", m.name}, {"min", m.min}, {"max", m.max}, {"init", m.init}});
    j["items"] = json::array();
    for (const auto& i : graph.items) {
        json ij = {{"name", i.name}};
        if (i.label)
            ij["label"] = *i.label;
        j["items"].push_back(std::move(ij));
    }
    j["flags"] = graph.flags;
    j["nodes"] = json::object();
    for (const auto& [id, node] : graph.nodes)
        j["nodes"][id] = node_to_json(node);
    // nlohmann::json orders object keys lexicographically.
    return j.dump() + "\n";
}

StoryGraph graph_decode(std::string_view bytes)
{
    if (bytes.empty())
        throw MalformedInput("empty input");
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw MalformedInput(std::string("syntax error: ") + e.what());
    }

    Reader r(j, "story");
    const json& version = r.get("version");
    if (!version.is_number_integer())
        r.fail("'version' must be an integer");
    if (version.get<std::int64_t>() != kGraphFormatVersion)
        throw UnsupportedVersion("unsupported story format version " + version.dump());

    StoryGraph g;
    g.version = kGraphFormatVersion;
    g.title = r.str("title");
    g.start = r.str("start");
    for (const auto& mj : r.array("meters")) {
        Reader mr(mj, "story.meters");
        MeterDef m;
        m.name = mr.str("name");
        m.min = mr.integer("min");
        m.max = mr.integer("max");
        m.init = mr.integer("init");
        mr.done();
        g.meters.push_back(std::move(m));
    }
    for (const auto& ij : r.array("items")) {
        Reader ir(ij, "story.items");
        ItemDef i;
        i.name = ir.str("name");
        if (const json* l = ir.get_opt("label"))
            i.label = ir.as_string(*l, "label");
        ir.done();
        g.items.push_back(std::move(i));
    }
    g.flags = strings_from_json(r.array("flags"), r, "flags");
    const json& nodes = r.get("nodes");
    if (!nodes.is_object())
        r.fail("'nodes' must be an object");
    for (const auto& [id, nj] : nodes.items())
        g.nodes.emplace(id, node_from_json(id, nj));
    r.done();

    auto diags = graph_validate(g);
    if (!diags.empty())
        throw InvalidGraph(std::move(diags));
    return g;
}

std::string sha256_hex(std::string_view bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string content_hash(const StoryGraph& graph)
{
    return sha256_hex(graph_encode(graph));
}

} // namespace fuselage
