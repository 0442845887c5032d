#pragma once

#include "fuselage/runtime.hpp"
#include "fuselage/story.hpp"

#include "json.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Static analyses over compiled story graphs.
//
// Reachability works on an abstract state of (node, flags, items held).
// Meters are ignored there: meter guards count as passing, and every
// mini-game contributes both its success and its failure edge. Witness
// traces, by contrast, are searched over concrete sessions so they always
// replay through the runtime.
namespace fuselage::analysis {

inline constexpr std::size_t kDefaultStateBudget = 1'000'000;

struct Options {
    std::size_t state_budget = kDefaultStateBudget;
};

class StateBudgetExceeded : public std::runtime_error {
public:
    explicit StateBudgetExceeded(std::size_t budget);
};

std::set<std::string> overapprox_reachable(const StoryGraph& graph);
std::set<std::string> exact_reachable(const StoryGraph& graph, const Options& opts = {});

enum class Coverage { Reachable, Unreachable };
std::map<std::string, Coverage> ending_coverage(const StoryGraph& graph, const Options& opts = {});
std::set<std::string> dead_nodes(const StoryGraph& graph, const Options& opts = {});

// Items that are taken somewhere and can also be given while already held.
// For those, presence is not an exact abstraction of the inventory count.
std::vector<std::string> inventory_abstraction_problems(const StoryGraph& graph, const Options& opts = {});

struct TraceStep {
    std::string node; // node the event is applied at
    Event event;
    bool operator==(const TraceStep&) const = default;
};
using Trace = std::vector<TraceStep>;

// Shortest event sequence from a fresh session that lands on `target`.
// nullopt means no concrete playthrough reaches it.
std::optional<Trace> trace_to(const StoryGraph& graph, const std::string& target, const Options& opts = {});

enum class Feasibility { Winnable, LossyOnly, Unwinnable };
std::string_view to_string(Feasibility f);

struct BiolinkVerdict {
    Feasibility verdict = Feasibility::Unwinnable;
    std::vector<BiolinkAction> witness;                     // shortest win, when Winnable
    std::optional<std::vector<BiolinkAction>> loss_witness; // shortest loss, if any
    std::size_t states = 0;                                 // reachable states explored
};

// Breadth-first search over (position, collected set, meter value).
// Winnable if a success state is reachable. Otherwise LossyOnly when every
// play runs into a loss (no cycle among non-terminal states), and
// Unwinnable when the player can stall forever.
BiolinkVerdict biolink_feasible(const BiolinkParams& params, const MeterDef& meter);
BiolinkVerdict biolink_feasible(const BiolinkParams& params, const MeterDef& meter, std::int64_t start_meter);

struct Report {
    std::set<std::string> reachable;
    std::set<std::string> dead;
    std::map<std::string, Coverage> endings;
    std::map<std::string, std::optional<Trace>> traces; // one per ending
    bool ok() const;
};

Report analyze(const StoryGraph& graph, const Options& opts = {});

// `{reachable:[], dead:[], endings:{}, traces:{}}`
nlohmann::json report_to_json(const Report& r);
std::string report_table(const StoryGraph& graph, const Report& r);
std::string to_dot(const StoryGraph& graph);

} // namespace fuselage::analysis
