#include "oracles.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace fuselage::oracle {

namespace {

// Items never taken can pile up without bound; guards only ask whether an
// item is held, so counts are saturated. Items that are taken are never
// given while held in the graphs under test, so they stay at 0 or 1.
constexpr int kCountCap = 3;

struct State {
    std::string node;
    std::size_t page = 0;
    std::set<std::string> flags;
    std::map<std::string, int> items;
    auto operator<=>(const State&) const = default;
};

bool passes(const Guard& g, const State& s)
{
    switch (g.kind) {
    case Guard::Kind::FlagSet: return s.flags.count(g.name) > 0;
    case Guard::Kind::FlagClear: return s.flags.count(g.name) == 0;
    case Guard::Kind::ItemHeld: {
        auto it = s.items.find(g.name);
        return it != s.items.end() && it->second > 0;
    }
    case Guard::Kind::Meter: return true;
    }
    return false;
}

State apply(const std::vector<Effect>& es, State s, const std::string& target)
{
    for (const auto& e : es) {
        switch (e.kind) {
        case Effect::Kind::SetFlag: s.flags.insert(e.name); break;
        case Effect::Kind::ClearFlag: s.flags.erase(e.name); break;
        case Effect::Kind::GiveItem: {
            int& c = s.items[e.name];
            if (c < kCountCap)
                ++c;
            break;
        }
        case Effect::Kind::TakeItem: {
            auto it = s.items.find(e.name);
            if (it != s.items.end() && --it->second == 0)
                s.items.erase(it);
            break;
        }
        case Effect::Kind::MeterDelta: break;
        }
    }
    s.node = target;
    s.page = 0;
    return s;
}

} // namespace

std::set<std::string> reachable_nodes(const StoryGraph& g)
{
    std::set<State> seen;
    std::vector<State> stack{State{g.start, 0, {}, {}}};
    std::set<std::string> nodes;
    while (!stack.empty()) {
        State s = std::move(stack.back());
        stack.pop_back();
        if (!seen.insert(s).second)
            continue;
        nodes.insert(s.node);
        const Node& n = g.nodes.at(s.node);
        if (const auto* nar = std::get_if<NarrationBody>(&n.body)) {
            if (s.page + 1 < nar->pages.size()) {
                State next = s;
                ++next.page;
                stack.push_back(std::move(next));
            } else {
                stack.push_back(apply(nar->effects, s, nar->next));
            }
        } else if (const auto* ch = std::get_if<ChoiceBody>(&n.body)) {
            for (const auto& o : ch->options) {
                bool ok = true;
                for (const auto& gd : o.guards)
                    ok = ok && passes(gd, s);
                if (ok)
                    stack.push_back(apply(o.effects, s, o.target));
            }
        } else if (const auto* mg = std::get_if<MiniGameBody>(&n.body)) {
            stack.push_back(apply({}, s, mg->success));
            stack.push_back(apply({}, s, mg->failure));
        }
    }
    return nodes;
}

BiolinkEnumeration enumerate_biolink(const BiolinkParams& p, const MeterDef& m, std::int64_t start_meter, std::size_t horizon)
{
    using Pos = std::pair<std::int64_t, std::int64_t>;
    using S = std::tuple<Pos, std::set<Pos>, std::int64_t>;
    const auto h = static_cast<std::int64_t>(p.grid.size());
    const auto w = static_cast<std::int64_t>(p.grid[0].size());
    auto tile = [&](Pos c) { return p.grid[static_cast<std::size_t>(c.second)][static_cast<std::size_t>(c.first)]; };

    Pos start{};
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x)
            if (tile({x, y}) == 'S')
                start = {x, y};

    BiolinkEnumeration out;
    std::set<S> frontier{S{start, {}, std::min(std::max(start_meter, m.min), m.max)}};
    for (std::size_t depth = 1; depth <= horizon && !frontier.empty(); ++depth) {
        std::set<S> next;
        for (const auto& [pos, got, meter] : frontier) {
            for (int a = 0; a < 6; ++a) {
                Pos to = pos;
                std::set<Pos> got2 = got;
                std::int64_t delta = -p.command_cost;
                if (a == 0) --to.second;
                if (a == 1) ++to.second;
                if (a == 2) ++to.first;
                if (a == 3) --to.first;
                if (a < 4 && (to.first < 0 || to.second < 0 || to.first >= w || to.second >= h || tile(to) == '#'))
                    to = pos;
                if (a == 4 && tile(pos) == 'T')
                    got2.insert(pos);
                if (a == 5)
                    delta = p.idle_regen;
                std::int64_t meter2 = std::min(std::max(meter + delta, m.min), m.max);
                if (meter2 <= p.loss_threshold) {
                    if (!out.shortest_loss)
                        out.shortest_loss = depth;
                } else if (static_cast<std::int64_t>(got2.size()) >= p.required_trash) {
                    if (!out.shortest_win)
                        out.shortest_win = depth;
                } else {
                    next.insert(S{to, std::move(got2), meter2});
                }
            }
        }
        frontier = std::move(next);
    }
    out.alive_at_horizon = !frontier.empty();
    return out;
}

} // namespace fuselage::oracle
