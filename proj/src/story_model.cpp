#include "fuselage/story.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

namespace fuselage {

std::string_view to_string(NodeKind k)
{
    switch (k) {
    case NodeKind::Narration: return "narration";
    case NodeKind::Choice: return "choice";
    case NodeKind::MiniGame: return "minigame";
    case NodeKind::Ending: return "ending";
    }
    return "?";
}

std::string_view to_string(Channel c)
{
    switch (c) {
    case Channel::Touch: return "touch";
    case Channel::Handset: return "handset";
    case Channel::Any: return "any";
    }
    return "?";
}

std::string_view to_string(MiniKind k)
{
    switch (k) {
    case MiniKind::Biolink: return "biolink";
    case MiniKind::Scan: return "scan";
    case MiniKind::Coord: return "coord";
    case MiniKind::Sequence: return "sequence";
    }
    return "?";
}

std::string_view to_string(EndingKind k)
{
    return k == EndingKind::Main ? "main" : "sub";
}

std::string_view to_string(Cmp c)
{
    switch (c) {
    case Cmp::Less: return "<";
    case Cmp::LessEq: return "<=";
    case Cmp::Equal: return "=";
    case Cmp::GreaterEq: return ">=";
    case Cmp::Greater: return ">";
    }
    return "?";
}

std::optional<Channel> channel_from_string(std::string_view s)
{
    if (s == "touch") return Channel::Touch;
    if (s == "handset") return Channel::Handset;
    if (s == "any") return Channel::Any;
    return std::nullopt;
}

std::optional<MiniKind> mini_kind_from_string(std::string_view s)
{
    if (s == "biolink") return MiniKind::Biolink;
    if (s == "scan") return MiniKind::Scan;
    if (s == "coord") return MiniKind::Coord;
    if (s == "sequence") return MiniKind::Sequence;
    return std::nullopt;
}

std::optional<EndingKind> ending_kind_from_string(std::string_view s)
{
    if (s == "main") return EndingKind::Main;
    if (s == "sub") return EndingKind::Sub;
    return std::nullopt;
}

std::optional<Cmp> cmp_from_string(std::string_view s)
{
    if (s == "<") return Cmp::Less;
    if (s == "<=") return Cmp::LessEq;
    if (s == "=") return Cmp::Equal;
    if (s == ">=") return Cmp::GreaterEq;
    if (s == ">") return Cmp::Greater;
    return std::nullopt;
}

bool compare(std::int64_t lhs, Cmp op, std::int64_t rhs)
{
    switch (op) {
    case Cmp::Less: return lhs < rhs;
    case Cmp::LessEq: return lhs <= rhs;
    case Cmp::Equal: return lhs == rhs;
    case Cmp::GreaterEq: return lhs >= rhs;
    case Cmp::Greater: return lhs > rhs;
    }
    return false;
}

static bool is_ascii_alpha(char c)
{
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

bool is_valid_identifier(std::string_view id)
{
    if (id.empty() || !is_ascii_alpha(id.front()))
        return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return is_ascii_alpha(c) || (c >= '0' && c <= '9') || c == '-';
    });
}

bool is_keypad_symbol(char c)
{
    switch (c) {
    case '.': case '-': case ' ':
    case 'N': case 'S': case 'E': case 'W':
    case 'n': case 's': case 'e': case 'w':
        return true;
    default:
        return c >= '0' && c <= '9';
    }
}

std::string normalize_coordinate(std::string_view s)
{
    std::string out;
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

bool BiolinkParams::in_bounds(Cell c) const
{
    return c.y >= 0 && c.y < height() && c.x >= 0 && c.x < static_cast<std::int64_t>(grid[c.y].size());
}

char BiolinkParams::at(Cell c) const
{
    return in_bounds(c) ? grid[c.y][c.x] : '#';
}

Cell BiolinkParams::start() const
{
    for (std::int64_t y = 0; y < height(); ++y)
        for (std::int64_t x = 0; x < static_cast<std::int64_t>(grid[y].size()); ++x)
            if (grid[y][x] == 'S')
                return {x, y};
    return {};
}

std::vector<Cell> BiolinkParams::trash_cells() const
{
    std::vector<Cell> out;
    for (std::int64_t y = 0; y < height(); ++y)
        for (std::int64_t x = 0; x < static_cast<std::int64_t>(grid[y].size()); ++x)
            if (grid[y][x] == 'T')
                out.push_back({x, y});
    return out;
}

MiniKind kind_of(const MiniGameParams& p)
{
    return static_cast<MiniKind>(p.index());
}

std::vector<std::string> Node::targets() const
{
    return std::visit([](const auto& b) -> std::vector<std::string> {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, NarrationBody>) {
            return {b.next};
        } else if constexpr (std::is_same_v<T, ChoiceBody>) {
            std::vector<std::string> out;
            for (const auto& o : b.options)
                out.push_back(o.target);
            return out;
        } else if constexpr (std::is_same_v<T, MiniGameBody>) {
            return {b.success, b.failure};
        } else {
            return {};
        }
    }, body);
}

Channel default_channel(const NodeBody& body)
{
    if (const auto* mg = std::get_if<MiniGameBody>(&body)) {
        switch (kind_of(mg->params)) {
        case MiniKind::Biolink:
        case MiniKind::Scan:
            return Channel::Handset;
        case MiniKind::Coord:
        case MiniKind::Sequence:
            return Channel::Any;
        }
    }
    return Channel::Touch;
}

const Node* StoryGraph::find(std::string_view id) const
{
    auto it = nodes.find(std::string(id));
    return it == nodes.end() ? nullptr : &it->second;
}

const Node& StoryGraph::at(std::string_view id) const
{
    const Node* n = find(id);
    if (!n)
        throw std::out_of_range("unknown node " + std::string(id));
    return *n;
}

const MeterDef* StoryGraph::meter(std::string_view name) const
{
    for (const auto& m : meters)
        if (m.name == name)
            return &m;
    return nullptr;
}

namespace {

class Validator {
public:
    explicit Validator(const StoryGraph& g) : g_(g) {}

    Diagnostics run()
    {
        declarations();
        if (g_.version < 1)
            error("", "bad-version", "version must be >= 1");
        if (!g_.find(g_.start))
            error(g_.start, "unknown-start", "unknown start node '" + g_.start + "'");
        bool has_ending = false;
        for (const auto& [key, node] : g_.nodes) {
            if (!is_valid_identifier(key) || key != node.id)
                error(key, "bad-node-id", "node id '" + key + "' is not a valid identifier or does not match its key");
            if (node.kind() == NodeKind::Ending)
                has_ending = true;
            for (const auto& t : node.targets())
                if (!g_.find(t))
                    error(key, "unknown-target", "unknown target '" + t + "'");
            body(node);
        }
        if (!has_ending)
            error("", "no-ending", "graph has no ending node");

        std::stable_sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
            return std::tie(a.subject, a.code) < std::tie(b.subject, b.code);
        });
        return std::move(out_);
    }

private:
    void error(const std::string& subject, std::string code, std::string message)
    {
        out_.push_back({Severity::Error, std::move(code), std::move(message), std::nullopt, subject});
    }

    void declarations()
    {
        std::map<std::string, int> meter_seen, item_seen, flag_seen;
        for (const auto& m : g_.meters) {
            if (!is_valid_identifier(m.name))
                error(m.name, "bad-decl-name", "meter name '" + m.name + "' is not a valid identifier");
            if (++meter_seen[m.name] == 2)
                error(m.name, "duplicate-decl", "meter '" + m.name + "' declared more than once");
            if (!(m.max > m.min) || m.init < m.min || m.init > m.max)
                error(m.name, "meter-range", "meter '" + m.name + "' needs min < max and min <= init <= max");
            meters_.insert(m.name);
        }
        for (const auto& i : g_.items) {
            if (!is_valid_identifier(i.name))
                error(i.name, "bad-decl-name", "item name '" + i.name + "' is not a valid identifier");
            if (++item_seen[i.name] == 2)
                error(i.name, "duplicate-decl", "item '" + i.name + "' declared more than once");
            items_.insert(i.name);
        }
        for (const auto& f : g_.flags) {
            if (!is_valid_identifier(f))
                error(f, "bad-decl-name", "flag name '" + f + "' is not a valid identifier");
            if (++flag_seen[f] == 2)
                error(f, "duplicate-decl", "flag '" + f + "' declared more than once");
            flags_.insert(f);
        }
    }

    void reference(const std::string& node, const char* what, const std::set<std::string>& decls, const std::string& name)
    {
        if (!decls.count(name))
            error(node, "unknown-name", std::string("undeclared ") + what + " '" + name + "'");
    }

    void guards(const std::string& node, const std::vector<Guard>& gs)
    {
        for (const auto& g : gs) {
            switch (g.kind) {
            case Guard::Kind::FlagSet:
            case Guard::Kind::FlagClear: reference(node, "flag", flags_, g.name); break;
            case Guard::Kind::ItemHeld: reference(node, "item", items_, g.name); break;
            case Guard::Kind::Meter: reference(node, "meter", meters_, g.name); break;
            }
        }
    }

    void effects(const std::string& node, const std::vector<Effect>& es)
    {
        for (const auto& e : es) {
            switch (e.kind) {
            case Effect::Kind::SetFlag:
            case Effect::Kind::ClearFlag: reference(node, "flag", flags_, e.name); break;
            case Effect::Kind::GiveItem:
            case Effect::Kind::TakeItem: reference(node, "item", items_, e.name); break;
            case Effect::Kind::MeterDelta: reference(node, "meter", meters_, e.name); break;
            }
        }
    }

    void body(const Node& node)
    {
        const std::string& id = node.id;
        std::visit([&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, NarrationBody>) {
                if (b.pages.empty())
                    error(id, "narration-empty", "narration requires at least one text page");
                effects(id, b.effects);
            } else if constexpr (std::is_same_v<T, ChoiceBody>) {
                if (b.options.size() < 2)
                    error(id, "choice-options", "choice requires ≥ 2 options");
                for (const auto& o : b.options) {
                    guards(id, o.guards);
                    effects(id, o.effects);
                }
            } else if constexpr (std::is_same_v<T, MiniGameBody>) {
                for (const auto& p : check_minigame_params(b.params, g_.meters))
                    error(id, p.code, p.message);
            }
        }, node.body);
    }

    const StoryGraph& g_;
    std::set<std::string> meters_, items_, flags_;
    Diagnostics out_;
};

} // namespace

std::vector<ParamProblem> check_minigame_params(const MiniGameParams& params, const std::vector<MeterDef>& meters)
{
    std::vector<ParamProblem> out;
    auto err = [&](const char* code, std::string msg) { out.push_back({code, std::move(msg)}); };

    if (const auto* bl = std::get_if<BiolinkParams>(&params)) {
        if (bl->grid.empty() || bl->grid.front().empty()) {
            err("biolink-grid-empty", "biolink grid must have at least one cell");
        } else {
            std::size_t starts = 0;
            bool bad_char = false;
            for (const auto& row : bl->grid) {
                if (row.size() != bl->grid.front().size()) {
                    err("biolink-grid-ragged", "biolink grid rows must all have the same width");
                    break;
                }
            }
            for (const auto& row : bl->grid)
                for (char c : row) {
                    if (c == 'S')
                        ++starts;
                    else if (c != '.' && c != 'T' && c != '#')
                        bad_char = true;
                }
            if (bad_char)
                err("biolink-grid-char", "biolink grid cells must be one of . T # S");
            if (starts != 1)
                err("biolink-start", "biolink grid needs exactly one S cell");
            auto trash = bl->trash_cells().size();
            if (trash > kMaxBiolinkTrash)
                err("biolink-too-much-trash", "biolink grid has more than 64 trash cells");
            if (bl->required_trash >= 0 && static_cast<std::size_t>(bl->required_trash) > trash)
                err("biolink-trash", "required_trash exceeds the number of T cells");
        }
        if (bl->command_cost < 0 || bl->idle_regen < 0 || bl->required_trash < 0 || bl->visibility < 1)
            err("biolink-param", "command_cost, idle_regen, required_trash must be >= 0 and visibility >= 1");
        if (std::none_of(meters.begin(), meters.end(), [&](const MeterDef& m) { return m.name == bl->meter; }))
            err("biolink-meter", "biolink meter '" + bl->meter + "' is not declared");
    } else if (const auto* sc = std::get_if<ScanParams>(&params)) {
        if (sc->width < 1 || sc->height < 1)
            err("scan-param", "scan width and height must be >= 1");
        if (sc->budget && *sc->budget < 1)
            err("scan-param", "scan budget must be >= 1");
        if (!sc->in_bounds(sc->target))
            err("scan-bounds", "scan target is out of bounds");
        for (const auto& d : sc->decoys) {
            if (!sc->in_bounds(d))
                err("scan-bounds", "scan decoy is out of bounds");
            if (d == sc->target)
                err("scan-target-decoy", "scan target must not also be a decoy");
        }
    } else if (const auto* co = std::get_if<CoordParams>(&params)) {
        if (co->max_attempts && *co->max_attempts < 1)
            err("coord-param", "max_attempts must be >= 1");
        auto norm = normalize_coordinate(co->expected);
        bool enterable = !norm.empty() && norm.size() <= kCoordBufferCap
            && std::all_of(norm.begin(), norm.end(), is_keypad_symbol);
        if (!enterable)
            err("coord-expected", "expected coordinate cannot be typed on the handset keypad");
    } else if (const auto* sq = std::get_if<SequenceParams>(&params)) {
        if (sq->steps.empty())
            err("sequence-empty", "sequence needs at least one step");
        for (const auto& s : sq->steps)
            if (!is_valid_identifier(s.id))
                err("sequence-step", "sequence step id '" + s.id + "' is not a valid identifier");
    }
    return out;
}

Diagnostics graph_validate(const StoryGraph& graph)
{
    return Validator(graph).run();
}

InvalidGraph::InvalidGraph(Diagnostics diags)
    : std::runtime_error(diags.empty() ? std::string("invalid graph") : "invalid graph: " + format(diags.front()))
    , diags_(std::move(diags))
{
}

} // namespace fuselage
