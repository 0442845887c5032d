#include "fuselage/runtime.hpp"

#include <algorithm>
#include <limits>

namespace fuselage {

bool Session::operator==(const Session& o) const
{
    const bool same_graph = graph == o.graph || (graph && o.graph && *graph == *o.graph);
    return same_graph && current == o.current && flags == o.flags && inventory == o.inventory
        && meters == o.meters && page == o.page && mini == o.mini && seed == o.seed
        && event_count == o.event_count && finished == o.finished;
}

MiniAction to_mini_action(BiolinkAction a)
{
    switch (a) {
    case BiolinkAction::MoveN: return {MiniAction::Kind::MoveN, {}, {}};
    case BiolinkAction::MoveS: return {MiniAction::Kind::MoveS, {}, {}};
    case BiolinkAction::MoveE: return {MiniAction::Kind::MoveE, {}, {}};
    case BiolinkAction::MoveW: return {MiniAction::Kind::MoveW, {}, {}};
    case BiolinkAction::Grab: return {MiniAction::Kind::Grab, {}, {}};
    case BiolinkAction::Wait: return {MiniAction::Kind::Wait, {}, {}};
    }
    return {};
}

namespace {

void enter(Session& s, const std::string& id)
{
    s.current = id;
    s.page = 0;
    const Node& n = s.graph->at(id);
    if (const auto* mg = std::get_if<MiniGameBody>(&n.body))
        s.mini = initial_mini_state(mg->params);
    else
        s.mini.reset();
}

std::optional<BiolinkAction> biolink_action(MiniAction::Kind k)
{
    switch (k) {
    case MiniAction::Kind::MoveN: return BiolinkAction::MoveN;
    case MiniAction::Kind::MoveS: return BiolinkAction::MoveS;
    case MiniAction::Kind::MoveE: return BiolinkAction::MoveE;
    case MiniAction::Kind::MoveW: return BiolinkAction::MoveW;
    case MiniAction::Kind::Grab: return BiolinkAction::Grab;
    case MiniAction::Kind::Wait: return BiolinkAction::Wait;
    default: return std::nullopt;
    }
}

EngineNote bad_event(const Node& n)
{
    return {"bad-event", "that input does nothing at a " + std::string(to_string(n.kind())) + " node"};
}

struct MiniResolution {
    bool handled = false;
    bool accepted = false;
    MiniOutcome outcome = MiniOutcome::Continue;
};

// Runs one mini-game input against the session's mini state in place.
MiniResolution run_mini(Session& s, const MiniGameBody& mg, const Event& ev, std::vector<EngineNote>& notes)
{
    MiniResolution r;
    auto take = [&](auto&& step) {
        r.handled = true;
        r.accepted = step.accepted;
        r.outcome = step.outcome;
        notes.insert(notes.end(), step.notes.begin(), step.notes.end());
        if (step.accepted)
            s.mini = std::move(step.state);
    };

    const auto* action = std::get_if<MiniAction>(&ev.payload);
    const auto* key = std::get_if<Key>(&ev.payload);

    switch (kind_of(mg.params)) {
    case MiniKind::Biolink: {
        if (!action)
            break;
        auto a = biolink_action(action->kind);
        if (!a)
            break;
        const auto& params = std::get<BiolinkParams>(mg.params);
        const MeterDef& def = *s.graph->meter(params.meter);
        auto step = biolink_update(params, std::get<BiolinkState>(*s.mini), s.meters[params.meter], def, *a);
        s.meters[params.meter] = step.meter;
        take(step);
        break;
    }
    case MiniKind::Scan:
        if (action && action->kind == MiniAction::Kind::Scan)
            take(scan_update(std::get<ScanParams>(mg.params), std::get<ScanState>(*s.mini), action->cell));
        break;
    case MiniKind::Coord: {
        const auto& params = std::get<CoordParams>(mg.params);
        const auto& state = std::get<CoordState>(*s.mini);
        if (key) {
            if (key->symbol == "⏎" || key->symbol == "enter")
                take(coord_update(params, state, CoordInput::Submit));
            else
                take(coord_update(params, state, CoordInput::Key, key->symbol));
        } else if (action && action->kind == MiniAction::Kind::Submit) {
            take(coord_update(params, state, CoordInput::Submit));
        } else if (action && action->kind == MiniAction::Kind::Backspace) {
            take(coord_update(params, state, CoordInput::Backspace));
        }
        break;
    }
    case MiniKind::Sequence:
        if (action && action->kind == MiniAction::Kind::Do)
            take(sequence_update(std::get<SequenceParams>(mg.params), std::get<SequenceState>(*s.mini), action->step, ev.channel));
        break;
    }
    return r;
}

} // namespace

Session new_session(std::shared_ptr<const StoryGraph> graph, std::uint64_t seed)
{
    Session s;
    s.graph = std::move(graph);
    s.seed = seed;
    for (const auto& m : s.graph->meters)
        s.meters[m.name] = m.init;
    enter(s, s.graph->start);
    return s;
}

bool guard_passes(const Guard& g, const Session& s)
{
    switch (g.kind) {
    case Guard::Kind::FlagSet: return s.flags.count(g.name) > 0;
    case Guard::Kind::FlagClear: return s.flags.count(g.name) == 0;
    case Guard::Kind::ItemHeld: return s.inventory.count(g.name) > 0;
    case Guard::Kind::Meter: {
        auto it = s.meters.find(g.name);
        return it != s.meters.end() && compare(it->second, g.cmp, g.value);
    }
    }
    return false;
}

bool guards_pass(const std::vector<Guard>& gs, const Session& s)
{
    return std::all_of(gs.begin(), gs.end(), [&](const Guard& g) { return guard_passes(g, s); });
}

void apply_effects(const std::vector<Effect>& effects, const StoryGraph& graph, Session& s)
{
    for (const auto& e : effects) {
        switch (e.kind) {
        case Effect::Kind::SetFlag: s.flags.insert(e.name); break;
        case Effect::Kind::ClearFlag: s.flags.erase(e.name); break;
        case Effect::Kind::GiveItem: ++s.inventory[e.name]; break;
        case Effect::Kind::TakeItem: {
            auto it = s.inventory.find(e.name);
            if (it != s.inventory.end() && --it->second <= 0)
                s.inventory.erase(it);
            break;
        }
        case Effect::Kind::MeterDelta: {
            const MeterDef* def = graph.meter(e.name);
            std::int64_t& v = s.meters[e.name];
            std::int64_t r = 0;
            if (__builtin_add_overflow(v, e.delta, &r))
                r = e.delta > 0 ? std::numeric_limits<std::int64_t>::max() : std::numeric_limits<std::int64_t>::min();
            v = def ? def->clamp(r) : r;
            break;
        }
        }
    }
}

std::vector<std::size_t> visible_options(const Session& s)
{
    std::vector<std::size_t> out;
    if (const auto* ch = std::get_if<ChoiceBody>(&s.node().body))
        for (std::size_t i = 0; i < ch->options.size(); ++i)
            if (guards_pass(ch->options[i].guards, s))
                out.push_back(i);
    return out;
}

StepResult apply_event(const Session& session, const Event& event)
{
    if (session.finished)
        throw SessionFinished();

    StepResult r{session, {}, false};
    Session& s = r.session;
    const Node& node = s.node();

    if (event.channel == Channel::Any || !node.accepts(event.channel)) {
        r.notes.push_back({"wrong-channel", "this step is operated from the "
            + std::string(node.channel == Channel::Handset ? "handset" : "touchscreen")});
        return r;
    }

    auto reject = [&](EngineNote note) {
        r.session = session;
        r.notes.push_back(std::move(note));
        r.accepted = false;
        return r;
    };

    switch (node.kind()) {
    case NodeKind::Narration: {
        if (!std::holds_alternative<Advance>(event.payload))
            return reject(bad_event(node));
        const auto& nar = std::get<NarrationBody>(node.body);
        if (s.page + 1 < static_cast<std::int64_t>(nar.pages.size())) {
            ++s.page;
        } else {
            apply_effects(nar.effects, *s.graph, s);
            enter(s, nar.next);
        }
        break;
    }
    case NodeKind::Choice: {
        const auto* choose = std::get_if<Choose>(&event.payload);
        if (!choose)
            return reject(bad_event(node));
        auto visible = visible_options(s);
        if (choose->index < 0 || choose->index >= static_cast<std::int64_t>(visible.size()))
            return reject({"bad-choice", "no such option"});
        const Option& opt = std::get<ChoiceBody>(node.body).options[visible[choose->index]];
        apply_effects(opt.effects, *s.graph, s);
        enter(s, opt.target);
        break;
    }
    case NodeKind::MiniGame: {
        const auto& mg = std::get<MiniGameBody>(node.body);
        auto res = run_mini(s, mg, event, r.notes);
        if (!res.handled)
            return reject(bad_event(node));
        if (!res.accepted) {
            auto notes = std::move(r.notes);
            r.session = session;
            r.notes = std::move(notes);
            return r;
        }
        if (res.outcome == MiniOutcome::Success)
            enter(s, mg.success);
        else if (res.outcome == MiniOutcome::Failure)
            enter(s, mg.failure);
        break;
    }
    case NodeKind::Ending:
        if (!std::holds_alternative<Ack>(event.payload))
            return reject(bad_event(node));
        s.finished = node.id;
        break;
    }
    ++s.event_count;
    r.accepted = true;
    return r;
}

View view(const Session& s)
{
    View v;
    const Node& node = s.node();
    v.node = node.id;
    v.kind = node.kind();
    if (node.channel == Channel::Any)
        v.channels = {Channel::Touch, Channel::Handset};
    else
        v.channels = {node.channel};
    for (const auto& m : s.graph->meters)
        v.meters.push_back({m.name, s.meters.at(m.name), m.min, m.max});
    v.finished = s.finished;

    std::visit([&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, NarrationBody>) {
            v.page = s.page;
            v.page_count = static_cast<std::int64_t>(b.pages.size());
            v.text = b.pages.at(static_cast<std::size_t>(s.page));
        } else if constexpr (std::is_same_v<T, ChoiceBody>) {
            v.text = b.prompt;
            auto visible = visible_options(s);
            for (std::size_t i = 0; i < visible.size(); ++i)
                v.options.push_back({i, visible[i], b.options[visible[i]].label});
        } else if constexpr (std::is_same_v<T, EndingBody>) {
            v.text = b.text;
            v.ending = b.kind;
        } else if constexpr (std::is_same_v<T, MiniGameBody>) {
            v.game = kind_of(b.params);
            if (const auto* p = std::get_if<BiolinkParams>(&b.params)) {
                const auto& st = std::get<BiolinkState>(*s.mini);
                BiolinkView bv;
                bv.creature = p->creature;
                bv.meter = p->meter;
                bv.position = st.position;
                bv.visibility = p->visibility;
                bv.collected = static_cast<std::int64_t>(st.collected.size());
                bv.required = p->required_trash;
                for (std::int64_t y = st.position.y - p->visibility; y <= st.position.y + p->visibility; ++y)
                    for (std::int64_t x = st.position.x - p->visibility; x <= st.position.x + p->visibility; ++x) {
                        Cell c{x, y};
                        if (!p->in_bounds(c))
                            continue;
                        char ch = p->at(c);
                        std::string tile = ch == '#' ? "wall" : ch == 'T' ? (st.collected.count(c) ? "collected" : "trash") : "open";
                        bv.tiles.push_back({c, tile});
                    }
                v.text = "Bio-link: " + p->creature;
                v.mini = std::move(bv);
            } else if (const auto* p = std::get_if<ScanParams>(&b.params)) {
                const auto& st = std::get<ScanState>(*s.mini);
                ScanView sv{p->width, p->height, {}, st.scans_used, p->budget};
                for (const auto& c : st.revealed) {
                    bool decoy = std::find(p->decoys.begin(), p->decoys.end(), c) != p->decoys.end();
                    sv.revealed.push_back({c, c == p->target ? "target" : decoy ? "decoy" : "empty"});
                }
                std::sort(sv.revealed.begin(), sv.revealed.end(), [](const ScanMark& a, const ScanMark& b) {
                    return std::pair(a.cell.y, a.cell.x) < std::pair(b.cell.y, b.cell.x);
                });
                v.text = "Scan the area for suspicious objects";
                v.mini = std::move(sv);
            } else if (const auto* p = std::get_if<CoordParams>(&b.params)) {
                const auto& st = std::get<CoordState>(*s.mini);
                v.text = "Enter coordinates";
                v.mini = CoordView{st.buffer, st.attempts_used, p->max_attempts};
            } else if (const auto* p = std::get_if<SequenceParams>(&b.params)) {
                const auto& st = std::get<SequenceState>(*s.mini);
                SequenceView qv{st.next_step, static_cast<std::int64_t>(p->steps.size()), {}};
                for (const auto& step : p->steps)
                    qv.steps.push_back(step.id);
                std::sort(qv.steps.begin(), qv.steps.end());
                qv.steps.erase(std::unique(qv.steps.begin(), qv.steps.end()), qv.steps.end());
                v.text = "Operate the controls";
                v.mini = std::move(qv);
            }
        }
    }, node.body);
    return v;
}

} // namespace fuselage
