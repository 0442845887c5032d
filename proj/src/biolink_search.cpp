#include "fuselage/analysis.hpp"

#include <deque>
#include <unordered_map>

namespace fuselage::analysis {

std::string_view to_string(Feasibility f)
{
    switch (f) {
    case Feasibility::Winnable: return "winnable";
    case Feasibility::LossyOnly: return "lossy-only";
    case Feasibility::Unwinnable: return "unwinnable";
    }
    return "unwinnable";
}

namespace {

struct Key {
    std::int64_t cell;
    std::uint64_t mask;
    std::int64_t meter;
    bool operator==(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const
    {
        std::size_t h = std::hash<std::int64_t>{}(k.cell);
        h = h * 1000003u ^ std::hash<std::uint64_t>{}(k.mask);
        return h * 1000003u ^ std::hash<std::int64_t>{}(k.meter);
    }
};

struct Visited {
    std::size_t parent;
    BiolinkAction action;
};

} // namespace

BiolinkVerdict biolink_feasible(const BiolinkParams& params, const MeterDef& meter)
{
    return biolink_feasible(params, meter, meter.init);
}

BiolinkVerdict biolink_feasible(const BiolinkParams& params, const MeterDef& meter_def, std::int64_t start_meter)
{
    const auto trash = params.trash_cells();
    const std::int64_t w = params.width();
    auto bit_of = [&](Cell c) {
        for (std::size_t i = 0; i < trash.size(); ++i)
            if (trash[i] == c)
                return i;
        return trash.size();
    };
    auto encode = [&](const BiolinkState& st, std::int64_t m) {
        std::uint64_t mask = 0;
        for (const auto& c : st.collected)
            mask |= std::uint64_t{1} << bit_of(c);
        return Key{st.position.y * w + st.position.x, mask, m};
    };
    auto decode = [&](const Key& k) {
        BiolinkState st;
        st.position = {k.cell % w, k.cell / w};
        for (std::size_t i = 0; i < trash.size(); ++i)
            if (k.mask >> i & 1)
                st.collected.insert(trash[i]);
        return st;
    };

    BiolinkVerdict out;
    std::vector<Key> states;
    std::vector<Visited> via;
    std::vector<std::vector<std::size_t>> succ; // Continue -> Continue edges
    std::unordered_map<Key, std::size_t, KeyHash> index;

    auto path_to = [&](std::size_t id, std::optional<BiolinkAction> last) {
        std::vector<BiolinkAction> acts;
        if (last)
            acts.push_back(*last);
        while (id != 0) {
            acts.push_back(via[id].action);
            id = via[id].parent;
        }
        return std::vector<BiolinkAction>(acts.rbegin(), acts.rend());
    };

    const Key start = encode(BiolinkState{params.start(), {}}, meter_def.clamp(start_meter));
    states.push_back(start);
    via.push_back({0, BiolinkAction::Wait});
    succ.emplace_back();
    index.emplace(start, 0);
    bool won = params.required_trash <= 0;

    for (std::size_t head = 0; head < states.size(); ++head) {
        const BiolinkState st = decode(states[head]);
        const std::int64_t m = states[head].meter;
        for (auto a : kBiolinkActions) {
            auto step = biolink_update(params, st, m, meter_def, a);
            if (step.outcome == MiniOutcome::Success) {
                if (!won) {
                    won = true;
                    out.witness = path_to(head, a);
                }
                continue;
            }
            if (step.outcome == MiniOutcome::Failure) {
                if (!out.loss_witness)
                    out.loss_witness = path_to(head, a);
                continue;
            }
            Key k = encode(step.state, step.meter);
            auto [it, fresh] = index.emplace(k, states.size());
            if (fresh) {
                states.push_back(k);
                via.push_back({head, a});
                succ.emplace_back();
            }
            succ[head].push_back(it->second);
        }
    }
    out.states = states.size();

    if (won) {
        out.verdict = Feasibility::Winnable;
        return out;
    }

    // Kahn's algorithm: if every Continue state can be peeled off, the
    // Continue subgraph is acyclic and every play ends in a loss.
    std::vector<std::size_t> indegree(states.size(), 0);
    for (const auto& edges : succ)
        for (auto t : edges)
            ++indegree[t];
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < states.size(); ++i)
        if (indegree[i] == 0)
            ready.push_back(i);
    std::size_t removed = 0;
    while (!ready.empty()) {
        auto i = ready.front();
        ready.pop_front();
        ++removed;
        for (auto t : succ[i])
            if (--indegree[t] == 0)
                ready.push_back(t);
    }
    out.verdict = removed == states.size() ? Feasibility::LossyOnly : Feasibility::Unwinnable;
    return out;
}

} // namespace fuselage::analysis
