#include "fuselage/analysis.hpp"

#include "fuselage/wire.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace fuselage::analysis {

StateBudgetExceeded::StateBudgetExceeded(std::size_t budget)
    : std::runtime_error("analysis state budget of " + std::to_string(budget) + " states exceeded")
{
}

std::set<std::string> overapprox_reachable(const StoryGraph& graph)
{
    std::set<std::string> seen;
    if (!graph.find(graph.start))
        return seen;
    std::deque<std::string> work{graph.start};
    seen.insert(graph.start);
    while (!work.empty()) {
        std::string id = std::move(work.front());
        work.pop_front();
        for (const auto& t : graph.at(id).targets())
            if (graph.find(t) && seen.insert(t).second)
                work.push_back(t);
    }
    return seen;
}

namespace {

// Abstract transition system over (node, flags, items held).
class AbstractGraph {
public:
    explicit AbstractGraph(const StoryGraph& g)
    {
        for (const auto& [id, n] : g.nodes) {
            index_[id] = ids_.size();
            ids_.push_back(id);
        }
        for (std::size_t i = 0; i < g.flags.size(); ++i)
            flag_[g.flags[i]] = i;
        for (std::size_t i = 0; i < g.items.size(); ++i)
            item_[g.items[i].name] = i;
        flag_bytes_ = (g.flags.size() + 7) / 8;
        item_bytes_ = (g.items.size() + 7) / 8;

        edges_.resize(ids_.size());
        for (const auto& [id, n] : g.nodes) {
            auto& out = edges_[index_.at(id)];
            if (const auto* nar = std::get_if<NarrationBody>(&n.body)) {
                out.push_back({{}, nar->effects, index_.at(nar->next)});
            } else if (const auto* ch = std::get_if<ChoiceBody>(&n.body)) {
                for (const auto& o : ch->options)
                    out.push_back({o.guards, o.effects, index_.at(o.target)});
            } else if (const auto* mg = std::get_if<MiniGameBody>(&n.body)) {
                out.push_back({{}, {}, index_.at(mg->success)});
                out.push_back({{}, {}, index_.at(mg->failure)});
            }
        }
        for (const auto& [id, n] : g.nodes) {
            auto collect = [&](const std::vector<Effect>& es) {
                for (const auto& e : es)
                    if (e.kind == Effect::Kind::TakeItem)
                        taken_.insert(e.name);
            };
            if (const auto* nar = std::get_if<NarrationBody>(&n.body))
                collect(nar->effects);
            else if (const auto* ch = std::get_if<ChoiceBody>(&n.body))
                for (const auto& o : ch->options)
                    collect(o.effects);
        }
        start_ = index_.at(g.start);
    }

    struct Visit {
        std::set<std::string> nodes;
        std::set<std::string> multiplicity_problems;
    };

    Visit explore(const Options& opts) const
    {
        Visit v;
        std::unordered_set<std::string> seen;
        std::deque<std::string> work;
        std::string init(4 + flag_bytes_ + item_bytes_, '\0');
        set_node(init, start_);
        seen.insert(init);
        work.push_back(init);
        std::vector<bool> node_seen(ids_.size(), false);

        while (!work.empty()) {
            std::string st = std::move(work.front());
            work.pop_front();
            const std::size_t n = get_node(st);
            node_seen[n] = true;
            for (const auto& e : edges_[n]) {
                if (!guards_pass(e.guards, st))
                    continue;
                std::string next = st;
                apply(e.effects, next, v.multiplicity_problems);
                set_node(next, e.target);
                if (seen.insert(next).second) {
                    if (seen.size() > opts.state_budget)
                        throw StateBudgetExceeded(opts.state_budget);
                    work.push_back(std::move(next));
                }
            }
        }
        for (std::size_t i = 0; i < ids_.size(); ++i)
            if (node_seen[i])
                v.nodes.insert(ids_[i]);
        return v;
    }

private:
    struct Edge {
        std::vector<Guard> guards;
        std::vector<Effect> effects;
        std::size_t target;
    };

    static void set_node(std::string& st, std::size_t n)
    {
        for (int i = 0; i < 4; ++i)
            st[i] = static_cast<char>((n >> (8 * i)) & 0xFF);
    }

    static std::size_t get_node(const std::string& st)
    {
        std::size_t n = 0;
        for (int i = 0; i < 4; ++i)
            n |= static_cast<std::size_t>(static_cast<unsigned char>(st[i])) << (8 * i);
        return n;
    }

    bool bit(const std::string& st, std::size_t offset, std::size_t i) const
    {
        return (static_cast<unsigned char>(st[offset + i / 8]) >> (i % 8)) & 1;
    }

    void set_bit(std::string& st, std::size_t offset, std::size_t i, bool on) const
    {
        auto b = static_cast<unsigned char>(st[offset + i / 8]);
        b = on ? (b | (1u << (i % 8))) : (b & ~(1u << (i % 8)));
        st[offset + i / 8] = static_cast<char>(b);
    }

    bool guards_pass(const std::vector<Guard>& gs, const std::string& st) const
    {
        for (const auto& g : gs) {
            switch (g.kind) {
            case Guard::Kind::FlagSet:
                if (!bit(st, 4, flag_.at(g.name))) return false;
                break;
            case Guard::Kind::FlagClear:
                if (bit(st, 4, flag_.at(g.name))) return false;
                break;
            case Guard::Kind::ItemHeld:
                if (!bit(st, 4 + flag_bytes_, item_.at(g.name))) return false;
                break;
            case Guard::Kind::Meter:
                break;
            }
        }
        return true;
    }

    void apply(const std::vector<Effect>& es, std::string& st, std::set<std::string>& problems) const
    {
        for (const auto& e : es) {
            switch (e.kind) {
            case Effect::Kind::SetFlag: set_bit(st, 4, flag_.at(e.name), true); break;
            case Effect::Kind::ClearFlag: set_bit(st, 4, flag_.at(e.name), false); break;
            case Effect::Kind::GiveItem:
                if (bit(st, 4 + flag_bytes_, item_.at(e.name)) && taken_.count(e.name))
                    problems.insert(e.name);
                set_bit(st, 4 + flag_bytes_, item_.at(e.name), true);
                break;
            case Effect::Kind::TakeItem: set_bit(st, 4 + flag_bytes_, item_.at(e.name), false); break;
            case Effect::Kind::MeterDelta: break;
            }
        }
    }

    std::vector<std::string> ids_;
    std::map<std::string, std::size_t> index_, flag_, item_;
    std::size_t flag_bytes_ = 0, item_bytes_ = 0;
    std::vector<std::vector<Edge>> edges_;
    std::set<std::string> taken_;
    std::size_t start_ = 0;
};

} // namespace

std::set<std::string> exact_reachable(const StoryGraph& graph, const Options& opts)
{
    return AbstractGraph(graph).explore(opts).nodes;
}

std::vector<std::string> inventory_abstraction_problems(const StoryGraph& graph, const Options& opts)
{
    auto v = AbstractGraph(graph).explore(opts);
    return {v.multiplicity_problems.begin(), v.multiplicity_problems.end()};
}

std::map<std::string, Coverage> ending_coverage(const StoryGraph& graph, const Options& opts)
{
    auto reach = exact_reachable(graph, opts);
    std::map<std::string, Coverage> out;
    for (const auto& [id, n] : graph.nodes)
        if (n.kind() == NodeKind::Ending)
            out[id] = reach.count(id) ? Coverage::Reachable : Coverage::Unreachable;
    return out;
}

std::set<std::string> dead_nodes(const StoryGraph& graph, const Options& opts)
{
    auto reach = exact_reachable(graph, opts);
    std::set<std::string> out;
    for (const auto& [id, n] : graph.nodes)
        if (!reach.count(id))
            out.insert(id);
    return out;
}

// ---------------------------------------------------------------------------
// Witness traces

namespace {

Channel preferred_channel(const Node& n)
{
    if (n.channel != Channel::Any)
        return n.channel;
    if (const auto* mg = std::get_if<MiniGameBody>(&n.body))
        if (kind_of(mg->params) == MiniKind::Coord)
            return Channel::Handset;
    return Channel::Touch;
}

std::string state_key(const Session& s)
{
    std::ostringstream k;
    k << s.current << '\x1f';
    for (const auto& f : s.flags)
        k << f << ',';
    k << '\x1f';
    for (const auto& [i, c] : s.inventory)
        k << i << '=' << c << ',';
    k << '\x1f';
    for (const auto& [m, v] : s.meters)
        k << m << '=' << v << ',';
    return k.str();
}

struct Plan {
    std::vector<Event> events;
    std::string expect; // node the plan must land on
};

class TraceSearch {
public:
    TraceSearch(const StoryGraph& g, const Options& opts)
        : graph_(std::make_shared<const StoryGraph>(g)), opts_(opts)
    {
    }

    std::optional<Trace> run(const std::string& target)
    {
        if (!graph_->find(target))
            return std::nullopt;
        Session start = new_session(graph_, 0);
        if (start.current == target)
            return Trace{};

        struct Entry {
            std::size_t cost;
            std::size_t seq;
            std::string key;
            bool operator>(const Entry& o) const { return std::tie(cost, seq) > std::tie(o.cost, o.seq); }
        };
        struct Record {
            Session session;
            std::size_t cost = 0;
            std::string parent;
            Trace steps;
            bool done = false;
        };
        std::unordered_map<std::string, Record> records;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
        std::size_t seq = 0;

        std::string k0 = state_key(start);
        records[k0] = Record{start, 0, {}, {}, false};
        pq.push({0, seq++, k0});

        while (!pq.empty()) {
            Entry e = pq.top();
            pq.pop();
            Record& rec = records.at(e.key);
            if (rec.done || e.cost != rec.cost)
                continue;
            rec.done = true;
            if (rec.session.current == target)
                return rebuild(records, e.key);

            const Session here = rec.session;
            for (auto& plan : plans(here)) {
                auto outcome = simulate(here, plan);
                if (!outcome)
                    continue;
                auto& [next, steps] = *outcome;
                next.event_count = 0;
                std::string key = state_key(next);
                std::size_t cost = e.cost + steps.size();
                auto it = records.find(key);
                if (it == records.end()) {
                    if (records.size() >= opts_.state_budget)
                        throw StateBudgetExceeded(opts_.state_budget);
                    records.emplace(key, Record{std::move(next), cost, e.key, std::move(steps), false});
                    pq.push({cost, seq++, key});
                } else if (!it->second.done && cost < it->second.cost) {
                    it->second.cost = cost;
                    it->second.parent = e.key;
                    it->second.steps = std::move(steps);
                    pq.push({cost, seq++, key});
                }
            }
        }
        return std::nullopt;
    }

private:
    template <class Records>
    static Trace rebuild(const Records& records, std::string key)
    {
        std::vector<const Trace*> chunks;
        while (true) {
            const auto& r = records.at(key);
            if (r.parent.empty() && r.steps.empty())
                break;
            chunks.push_back(&r.steps);
            key = r.parent;
        }
        Trace out;
        for (auto it = chunks.rbegin(); it != chunks.rend(); ++it)
            out.insert(out.end(), (*it)->begin(), (*it)->end());
        return out;
    }

    // Replays a plan through the runtime; the plan only counts if every
    // event is accepted and the session lands on the expected node exactly
    // at the last event.
    std::optional<std::pair<Session, Trace>> simulate(const Session& from, const Plan& plan) const
    {
        Session s = from;
        Trace steps;
        for (std::size_t i = 0; i < plan.events.size(); ++i) {
            if (i > 0 && s.current != from.current)
                return std::nullopt;
            std::string at = s.current;
            auto r = apply_event(s, plan.events[i]);
            if (!r.accepted)
                return std::nullopt;
            steps.push_back({at, plan.events[i]});
            s = std::move(r.session);
        }
        if (plan.events.empty() || s.current != plan.expect || s.page != 0)
            return std::nullopt;
        return std::pair{std::move(s), std::move(steps)};
    }

    std::vector<Plan> plans(const Session& s)
    {
        const Node& n = s.node();
        const Channel ch = preferred_channel(n);
        std::vector<Plan> out;
        if (const auto* nar = std::get_if<NarrationBody>(&n.body)) {
            out.push_back({std::vector<Event>(nar->pages.size(), Event{ch, Advance{}}), nar->next});
        } else if (const auto* cb = std::get_if<ChoiceBody>(&n.body)) {
            auto visible = visible_options(s);
            for (std::size_t i = 0; i < visible.size(); ++i)
                out.push_back({{Event{ch, Choose{static_cast<std::int64_t>(i)}}}, cb->options[visible[i]].target});
        } else if (const auto* mg = std::get_if<MiniGameBody>(&n.body)) {
            mini_plans(s, *mg, ch, out);
        }
        return out;
    }

    void mini_plans(const Session& s, const MiniGameBody& mg, Channel ch, std::vector<Plan>& out)
    {
        auto mini = [&](MiniAction a) { return Event{ch, std::move(a)}; };
        if (const auto* p = std::get_if<BiolinkParams>(&mg.params)) {
            const MeterDef& def = *graph_->meter(p->meter);
            const std::int64_t meter = s.meters.at(p->meter);
            auto key = std::pair(s.current, meter);
            auto it = biolink_cache_.find(key);
            if (it == biolink_cache_.end())
                it = biolink_cache_.emplace(key, biolink_feasible(*p, def, meter)).first;
            const BiolinkVerdict& v = it->second;
            auto to_events = [&](const std::vector<BiolinkAction>& acts) {
                std::vector<Event> evs;
                for (auto a : acts)
                    evs.push_back(mini(to_mini_action(a)));
                return evs;
            };
            if (v.verdict == Feasibility::Winnable) {
                if (!v.witness.empty()) {
                    out.push_back({to_events(v.witness), mg.success});
                } else {
                    // Already satisfied; any single action that does not
                    // lose completes it at runtime.
                    for (auto a : kBiolinkActions) {
                        auto step = biolink_update(*p, std::get<BiolinkState>(*s.mini), meter, def, a);
                        if (step.outcome == MiniOutcome::Success) {
                            out.push_back({to_events({a}), mg.success});
                            break;
                        }
                    }
                }
            }
            if (v.loss_witness)
                out.push_back({to_events(*v.loss_witness), mg.failure});
        } else if (const auto* p = std::get_if<ScanParams>(&mg.params)) {
            out.push_back({{mini({MiniAction::Kind::Scan, p->target, {}})}, mg.success});
            if (p->budget) {
                std::vector<Event> evs;
                for (std::int64_t y = 0; y < p->height && static_cast<std::int64_t>(evs.size()) <= *p->budget; ++y)
                    for (std::int64_t x = 0; x < p->width && static_cast<std::int64_t>(evs.size()) <= *p->budget; ++x)
                        if (Cell{x, y} != p->target)
                            evs.push_back(mini({MiniAction::Kind::Scan, {x, y}, {}}));
                if (static_cast<std::int64_t>(evs.size()) == *p->budget + 1)
                    out.push_back({std::move(evs), mg.failure});
            }
        } else if (const auto* p = std::get_if<CoordParams>(&mg.params)) {
            std::vector<Event> evs;
            for (char c : normalize_coordinate(p->expected))
                evs.push_back(Event{ch, Key{std::string(1, c)}});
            evs.push_back(mini({MiniAction::Kind::Submit, {}, {}}));
            out.push_back({std::move(evs), mg.success});
            if (p->max_attempts)
                out.push_back({std::vector<Event>(static_cast<std::size_t>(*p->max_attempts),
                                   mini({MiniAction::Kind::Submit, {}, {}})),
                    mg.failure});
        } else if (const auto* p = std::get_if<SequenceParams>(&mg.params)) {
            std::vector<Event> evs;
            for (const auto& step : p->steps)
                evs.push_back(Event{step.channel == Channel::Any ? Channel::Touch : step.channel,
                    MiniAction{MiniAction::Kind::Do, {}, step.id}});
            out.push_back({std::move(evs), mg.success});
        }
    }

    std::shared_ptr<const StoryGraph> graph_;
    Options opts_;
    std::map<std::pair<std::string, std::int64_t>, BiolinkVerdict> biolink_cache_;
};

} // namespace

std::optional<Trace> trace_to(const StoryGraph& graph, const std::string& target, const Options& opts)
{
    return TraceSearch(graph, opts).run(target);
}

// ---------------------------------------------------------------------------
// Reports

bool Report::ok() const
{
    return dead.empty()
        && std::all_of(endings.begin(), endings.end(), [](const auto& e) { return e.second == Coverage::Reachable; });
}

Report analyze(const StoryGraph& graph, const Options& opts)
{
    Report r;
    r.reachable = exact_reachable(graph, opts);
    for (const auto& [id, n] : graph.nodes) {
        if (!r.reachable.count(id))
            r.dead.insert(id);
        if (n.kind() == NodeKind::Ending) {
            r.endings[id] = r.reachable.count(id) ? Coverage::Reachable : Coverage::Unreachable;
            r.traces[id] = r.reachable.count(id) ? trace_to(graph, id, opts) : std::nullopt;
        }
    }
    return r;
}

nlohmann::json report_to_json(const Report& r)
{
    using json = nlohmann::json;
    json j;
    j["reachable"] = r.reachable;
    j["dead"] = r.dead;
    j["endings"] = json::object();
    for (const auto& [id, c] : r.endings)
        j["endings"][id] = c == Coverage::Reachable ? "reachable" : "unreachable";
    j["traces"] = json::object();
    for (const auto& [id, t] : r.traces) {
        if (!t) {
            j["traces"][id] = nullptr;
            continue;
        }
        json steps = json::array();
        for (const auto& s : *t)
            steps.push_back({{"node", s.node}, {"event", wire::event_to_json(s.event)}});
        j["traces"][id] = std::move(steps);
    }
    return j;
}

std::string report_table(const StoryGraph& graph, const Report& r)
{
    std::ostringstream out;
    out << "story: " << graph.title << "\n";
    out << "nodes: " << graph.nodes.size() << "  reachable: " << r.reachable.size() << "  dead: " << r.dead.size() << "\n\n";
    out << "ENDING               KIND  STATUS       TRACE\n";
    for (const auto& [id, c] : r.endings) {
        const auto& end = std::get<EndingBody>(graph.at(id).body);
        std::string status = c == Coverage::Reachable ? "reachable" : "unreachable";
        std::string trace = "-";
        auto t = r.traces.find(id);
        if (t != r.traces.end() && t->second)
            trace = std::to_string(t->second->size()) + " events";
        else if (c == Coverage::Reachable)
            trace = "none (meter-dependent)";
        out << id;
        for (std::size_t i = id.size(); i < 21; ++i)
            out << ' ';
        out << to_string(end.kind) << (end.kind == EndingKind::Sub ? "   " : "  ") << status;
        for (std::size_t i = status.size(); i < 13; ++i)
            out << ' ';
        out << trace << "\n";
    }
    if (!r.dead.empty()) {
        out << "\ndead nodes:";
        for (const auto& d : r.dead)
            out << ' ' << d;
        out << "\n";
    }
    return out.str();
}

std::string to_dot(const StoryGraph& graph)
{
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\')
                out += '\\';
            out += c;
        }
        return out + "\"";
    };
    std::ostringstream out;
    out << "digraph story {\n  rankdir=TB;\n";
    for (const auto& [id, n] : graph.nodes) {
        std::string shape = "box";
        std::string label = id + "\\n" + std::string(to_string(n.kind()));
        if (const auto* mg = std::get_if<MiniGameBody>(&n.body)) {
            shape = "hexagon";
            label = id + "\\n" + std::string(to_string(kind_of(mg->params)));
        } else if (const auto* e = std::get_if<EndingBody>(&n.body)) {
            shape = e->kind == EndingKind::Main ? "doubleoctagon" : "octagon";
            label = id + "\\n" + std::string(to_string(e->kind)) + " ending";
        } else if (n.kind() == NodeKind::Choice) {
            shape = "diamond";
        }
        out << "  " << quote(id) << " [shape=" << shape << ", label=\"" << label;
        out << "\"" << (id == graph.start ? ", style=bold" : "") << "];\n";
    }
    for (const auto& [id, n] : graph.nodes) {
        auto edge = [&](const std::string& to, const std::string& label) {
            out << "  " << quote(id) << " -> " << quote(to);
            if (!label.empty())
                out << " [label=" << quote(label) << "]";
            out << ";\n";
        };
        if (const auto* nar = std::get_if<NarrationBody>(&n.body)) {
            edge(nar->next, "");
        } else if (const auto* ch = std::get_if<ChoiceBody>(&n.body)) {
            for (const auto& o : ch->options)
                edge(o.target, o.label);
        } else if (const auto* mg = std::get_if<MiniGameBody>(&n.body)) {
            edge(mg->success, "success");
            edge(mg->failure, "failure");
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace fuselage::analysis
