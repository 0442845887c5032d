#include "fuselage/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <span>
#include <tuple>

namespace fuselage::dsl {

namespace {

enum class ParamType { Text, Int, Name, CellPair, Step };

struct ParamSpec {
    const char* key;
    ParamType type;
    bool required;
    bool repeatable;
};

// clang-format off
constexpr ParamSpec kBiolinkSchema[] = {
    {"creature", ParamType::Text, true, false},
    {"grid", ParamType::Text, true, true},
    {"command-cost", ParamType::Int, false, false},
    {"idle-regen", ParamType::Int, false, false},
    {"loss-threshold", ParamType::Int, false, false},
    {"meter", ParamType::Name, true, false},
    {"required-trash", ParamType::Int, true, false},
    {"visibility", ParamType::Int, false, false},
};
constexpr ParamSpec kScanSchema[] = {
    {"width", ParamType::Int, true, false},
    {"height", ParamType::Int, true, false},
    {"target", ParamType::CellPair, true, false},
    {"decoy", ParamType::CellPair, false, true},
    {"budget", ParamType::Int, false, false},
};
constexpr ParamSpec kCoordSchema[] = {
    {"expected", ParamType::Text, true, false},
    {"max-attempts", ParamType::Int, false, false},
};
constexpr ParamSpec kSequenceSchema[] = {
    {"step", ParamType::Step, true, true},
};
// clang-format on

std::span<const ParamSpec> schema_for(MiniKind k)
{
    switch (k) {
    case MiniKind::Biolink: return kBiolinkSchema;
    case MiniKind::Scan: return kScanSchema;
    case MiniKind::Coord: return kCoordSchema;
    case MiniKind::Sequence: return kSequenceSchema;
    }
    return {};
}

const char* type_name(ParamType t)
{
    switch (t) {
    case ParamType::Text: return "a string";
    case ParamType::Int: return "an integer";
    case ParamType::Name: return "an identifier";
    case ParamType::CellPair: return "a cell string \"x,y\"";
    case ParamType::Step: return "a step string \"id:channel\"";
    }
    return "?";
}

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<std::int64_t> parse_int(const std::string& s)
{
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

std::optional<Cell> parse_cell(const std::string& s)
{
    auto comma = s.find(',');
    if (comma == std::string::npos)
        return std::nullopt;
    auto x = parse_int(trim(std::string_view(s).substr(0, comma)));
    auto y = parse_int(trim(std::string_view(s).substr(comma + 1)));
    if (!x || !y)
        return std::nullopt;
    return Cell{*x, *y};
}

std::optional<SequenceStep> parse_step(const ParamValue& v)
{
    if (v.type == ParamValue::Type::Ident)
        return SequenceStep{v.text, Channel::Any};
    if (v.type != ParamValue::Type::String)
        return std::nullopt;
    auto colon = v.text.find(':');
    if (colon == std::string::npos)
        return std::nullopt;
    auto ch = channel_from_string(trim(std::string_view(v.text).substr(colon + 1)));
    std::string id = trim(std::string_view(v.text).substr(0, colon));
    if (!ch || !is_valid_identifier(id))
        return std::nullopt;
    return SequenceStep{id, *ch};
}

void error(Diagnostics& out, const SourceSpan& span, std::string code, std::string msg)
{
    out.push_back({Severity::Error, std::move(code), std::move(msg), span, {}});
}

void warning(Diagnostics& out, const SourceSpan& span, std::string code, std::string msg)
{
    out.push_back({Severity::Warning, std::move(code), std::move(msg), span, {}});
}

} // namespace

std::optional<MiniGameParams> lower_params(const AstMiniGame& mg, MiniKind kind, Diagnostics& out)
{
    const auto schema = schema_for(kind);
    const std::size_t errors_before = error_count(out);
    std::map<std::string, std::vector<const AstParam*>> by_key;

    for (const auto& p : mg.params) {
        auto spec = std::find_if(schema.begin(), schema.end(), [&](const ParamSpec& s) { return p.key.text == s.key; });
        if (spec == schema.end()) {
            error(out, p.key.span, "unknown-param",
                "unknown parameter '" + p.key.text + "' for " + std::string(to_string(kind)));
            continue;
        }
        auto& slot = by_key[p.key.text];
        if (!slot.empty() && !spec->repeatable) {
            error(out, p.key.span, "duplicate-param", "parameter '" + p.key.text + "' given more than once");
            continue;
        }
        const ParamValue& v = p.value;
        bool ok = true;
        switch (spec->type) {
        case ParamType::Text:
        case ParamType::Name: ok = v.type != ParamValue::Type::Int; break;
        case ParamType::Int: ok = v.type == ParamValue::Type::Int; break;
        case ParamType::CellPair: ok = v.type == ParamValue::Type::String && parse_cell(v.text).has_value(); break;
        case ParamType::Step: ok = parse_step(v).has_value(); break;
        }
        if (!ok) {
            error(out, v.span, "param-type", "parameter '" + p.key.text + "' must be " + type_name(spec->type));
            continue;
        }
        slot.push_back(&p);
    }
    for (const auto& s : schema)
        if (s.required && by_key[s.key].empty())
            error(out, mg.params_span, "missing-param", std::string("missing required parameter '") + s.key + "'");

    if (error_count(out) != errors_before)
        return std::nullopt;

    auto one = [&](const char* key) -> const ParamValue* {
        auto it = by_key.find(key);
        return it == by_key.end() || it->second.empty() ? nullptr : &it->second.front()->value;
    };
    auto int_or = [&](const char* key, std::int64_t dflt) {
        const ParamValue* v = one(key);
        return v ? v->integer : dflt;
    };

    switch (kind) {
    case MiniKind::Biolink: {
        BiolinkParams b;
        b.creature = one("creature")->text;
        for (const AstParam* p : by_key["grid"])
            b.grid.push_back(p->value.text);
        b.command_cost = int_or("command-cost", kDefaultCommandCost);
        b.idle_regen = int_or("idle-regen", kDefaultIdleRegen);
        b.loss_threshold = int_or("loss-threshold", kDefaultLossThreshold);
        b.meter = one("meter")->text;
        b.required_trash = one("required-trash")->integer;
        b.visibility = int_or("visibility", kDefaultVisibility);
        return b;
    }
    case MiniKind::Scan: {
        ScanParams s;
        s.width = one("width")->integer;
        s.height = one("height")->integer;
        s.target = *parse_cell(one("target")->text);
        for (const AstParam* p : by_key["decoy"])
            s.decoys.push_back(*parse_cell(p->value.text));
        if (const ParamValue* b = one("budget"))
            s.budget = b->integer;
        return s;
    }
    case MiniKind::Coord: {
        CoordParams c;
        c.expected = one("expected")->text;
        if (const ParamValue* m = one("max-attempts"))
            c.max_attempts = m->integer;
        return c;
    }
    case MiniKind::Sequence: {
        SequenceParams q;
        for (const AstParam* p : by_key["step"])
            q.steps.push_back(*parse_step(p->value));
        return q;
    }
    }
    return std::nullopt;
}

Diagnostics check(const Ast& ast)
{
    Diagnostics out;

    std::set<std::string> meters, items, flags;
    std::vector<MeterDef> meter_defs;
    for (const auto& m : ast.meters) {
        if (!meters.insert(m.name.text).second)
            error(out, m.name.span, "duplicate-decl", "meter '" + m.name.text + "' declared more than once");
        if (!(m.max > m.min) || m.init < m.min || m.init > m.max)
            error(out, m.name.span, "meter-range", "meter '" + m.name.text + "' needs min < max and min <= init <= max");
        meter_defs.push_back({m.name.text, m.min, m.max, m.init});
    }
    for (const auto& i : ast.items)
        if (!items.insert(i.name.text).second)
            error(out, i.name.span, "duplicate-decl", "item '" + i.name.text + "' declared more than once");
    for (const auto& f : ast.flags)
        if (!flags.insert(f.text).second)
            error(out, f.span, "duplicate-decl", "flag '" + f.text + "' declared more than once");

    std::map<std::string, const AstNode*> ids;
    for (const auto& n : ast.nodes)
        if (!ids.emplace(n.id.text, &n).second)
            error(out, n.id.span, "duplicate-node-id", "node '" + n.id.text + "' is already defined");

    if (!ids.count(ast.start.text))
        error(out, ast.start.span, "unknown-start", "unknown start node '" + ast.start.text + "'");

    auto target = [&](const Name& t) {
        if (!ids.count(t.text))
            error(out, t.span, "unknown-target", "unknown target '" + t.text + "'");
    };
    auto name_ref = [&](const Name& n, const char* what, const std::set<std::string>& decls) {
        if (!decls.count(n.text))
            error(out, n.span, "unknown-name", std::string("undeclared ") + what + " '" + n.text + "'");
    };
    auto effect_refs = [&](const std::vector<AstEffect>& es) {
        for (const auto& e : es) {
            switch (e.kind) {
            case Effect::Kind::SetFlag:
            case Effect::Kind::ClearFlag: name_ref(e.name, "flag", flags); break;
            case Effect::Kind::GiveItem:
            case Effect::Kind::TakeItem: name_ref(e.name, "item", items); break;
            case Effect::Kind::MeterDelta: name_ref(e.name, "meter", meters); break;
            }
        }
    };

    // Incoming edges, for the syntactic reachability warnings. Self loops
    // do not count.
    std::map<std::string, int> incoming;
    std::map<std::string, int> incoming_non_seq_failure;
    auto edge = [&](const std::string& from, const std::string& to, bool seq_failure) {
        if (from == to)
            return;
        ++incoming[to];
        if (!seq_failure)
            ++incoming_non_seq_failure[to];
    };

    bool has_ending = false;
    for (const auto& n : ast.nodes) {
        if (n.channel && !channel_from_string(n.channel->text))
            error(out, n.channel->span, "bad-channel", "unknown channel '" + n.channel->text + "' (touch, handset, any)");

        if (const auto* nar = std::get_if<AstNarration>(&n.body)) {
            target(nar->next);
            edge(n.id.text, nar->next.text, false);
            effect_refs(nar->effects);
        } else if (const auto* ch = std::get_if<AstChoice>(&n.body)) {
            if (ch->options.size() < 2)
                error(out, n.id.span, "choice-options", "choice requires ≥ 2 options");
            for (const auto& o : ch->options) {
                for (const auto& g : o.guards) {
                    switch (g.kind) {
                    case Guard::Kind::FlagSet:
                    case Guard::Kind::FlagClear: name_ref(g.name, "flag", flags); break;
                    case Guard::Kind::ItemHeld: name_ref(g.name, "item", items); break;
                    case Guard::Kind::Meter: name_ref(g.name, "meter", meters); break;
                    }
                }
                target(o.target);
                edge(n.id.text, o.target.text, false);
                effect_refs(o.effects);
            }
        } else if (const auto* mg = std::get_if<AstMiniGame>(&n.body)) {
            target(mg->success);
            target(mg->failure);
            auto kind = mini_kind_from_string(mg->game.text);
            edge(n.id.text, mg->success.text, false);
            edge(n.id.text, mg->failure.text, kind == MiniKind::Sequence);
            if (!kind) {
                error(out, mg->game.span, "bad-minigame-kind",
                    "unknown mini-game '" + mg->game.text + "' (biolink, scan, coord, sequence)");
                continue;
            }
            if (auto params = lower_params(*mg, *kind, out)) {
                for (const auto& p : check_minigame_params(*params, meter_defs))
                    error(out, mg->params_span, p.code, p.message);
            }
        } else if (const auto* end = std::get_if<AstEnding>(&n.body)) {
            has_ending = true;
            if (!ending_kind_from_string(end->ending.text))
                error(out, end->ending.span, "bad-ending-kind", "unknown ending kind '" + end->ending.text + "' (main, sub)");
        }
    }
    if (!has_ending)
        error(out, ast.span, "no-ending", "story has no ending node");

    std::set<std::string> warned;
    for (const auto& n : ast.nodes) {
        if (n.id.text != ast.start.text && !incoming.count(n.id.text) && warned.insert(n.id.text).second)
            warning(out, n.id.span, "unreachable-by-syntax", "node '" + n.id.text + "' has no incoming edge");
        if (const auto* mg = std::get_if<AstMiniGame>(&n.body)) {
            const std::string& f = mg->failure.text;
            if (mini_kind_from_string(mg->game.text) == MiniKind::Sequence && f != mg->success.text
                && f != ast.start.text && ids.count(f) && !incoming_non_seq_failure.count(f))
                warning(out, mg->failure.span, "sequence-failure-unreachable",
                    "sequence mini-games never fail, so '" + f + "' is only reachable through this failure edge");
        }
    }

    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.span->line, a.span->column, a.code) < std::tie(b.span->line, b.span->column, b.code);
    });
    return out;
}

} // namespace fuselage::dsl
