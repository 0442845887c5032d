#pragma once

#include "fuselage/story.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fuselage {

// Soft feedback from the engine. Rejected events produce a note and leave
// the session untouched.
struct EngineNote {
    std::string code;
    std::string message;
    bool operator==(const EngineNote&) const = default;
};

enum class MiniOutcome { Continue, Success, Failure };

// ---------------------------------------------------------------------------
// Mini-game state and update rules

struct BiolinkState {
    Cell position;
    std::set<Cell> collected;
    bool operator==(const BiolinkState&) const = default;
};

struct ScanState {
    std::set<Cell> revealed;
    std::int64_t scans_used = 0;
    bool operator==(const ScanState&) const = default;
};

struct CoordState {
    std::int64_t attempts_used = 0;
    std::string buffer;
    bool operator==(const CoordState&) const = default;
};

struct SequenceState {
    std::int64_t next_step = 0;
    bool operator==(const SequenceState&) const = default;
};

using MiniState = std::variant<BiolinkState, ScanState, CoordState, SequenceState>;

MiniState initial_mini_state(const MiniGameParams& params);

enum class BiolinkAction { MoveN, MoveS, MoveE, MoveW, Grab, Wait };
inline constexpr BiolinkAction kBiolinkActions[] = {
    BiolinkAction::MoveN, BiolinkAction::MoveS, BiolinkAction::MoveE,
    BiolinkAction::MoveW, BiolinkAction::Grab, BiolinkAction::Wait,
};

template <class State>
struct MiniStep {
    State state;
    std::int64_t meter = 0; // biolink only
    MiniOutcome outcome = MiniOutcome::Continue;
    bool accepted = true;
    std::vector<EngineNote> notes;
};

// Every action except Wait costs `command_cost`; Wait regains `idle_regen`.
// The meter is clamped to its declared range. Loss (meter at or below the
// threshold) is checked before success.
MiniStep<BiolinkState> biolink_update(const BiolinkParams& params, const BiolinkState& state,
    std::int64_t meter, const MeterDef& meter_def, BiolinkAction action);

MiniStep<ScanState> scan_update(const ScanParams& params, const ScanState& state, Cell cell);

enum class CoordInput { Key, Submit, Backspace };
MiniStep<CoordState> coord_update(const CoordParams& params, const CoordState& state,
    CoordInput input, std::string_view symbol = {});

MiniStep<SequenceState> sequence_update(const SequenceParams& params, const SequenceState& state,
    std::string_view step, Channel channel);

// ---------------------------------------------------------------------------
// Events

struct Advance {
    bool operator==(const Advance&) const = default;
};
struct Choose {
    std::int64_t index = 0; // into the guard-filtered option list
    bool operator==(const Choose&) const = default;
};
struct Key {
    std::string symbol;
    bool operator==(const Key&) const = default;
};
struct Ack {
    bool operator==(const Ack&) const = default;
};

struct MiniAction {
    enum class Kind { MoveN, MoveS, MoveE, MoveW, Grab, Wait, Scan, Submit, Backspace, Do };
    Kind kind = Kind::Wait;
    Cell cell;        // Scan
    std::string step; // Do
    bool operator==(const MiniAction&) const = default;
};

MiniAction to_mini_action(BiolinkAction a);

using EventPayload = std::variant<Advance, Choose, Key, MiniAction, Ack>;

struct Event {
    Channel channel = Channel::Touch; // Touch or Handset
    EventPayload payload;
    bool operator==(const Event&) const = default;
};

// ---------------------------------------------------------------------------
// Session

struct Session {
    std::shared_ptr<const StoryGraph> graph;
    std::string current;
    std::set<std::string> flags;
    std::map<std::string, std::int64_t> inventory; // item -> count, counts > 0 only
    std::map<std::string, std::int64_t> meters;
    std::int64_t page = 0;
    std::optional<MiniState> mini;
    std::uint64_t seed = 0;
    std::uint64_t event_count = 0;
    std::optional<std::string> finished;

    const Node& node() const { return graph->at(current); }

    // Structural equality of the state; graphs compare by content.
    bool operator==(const Session& other) const;
};

class SessionFinished : public std::runtime_error {
public:
    SessionFinished() : std::runtime_error("session already finished") {}
};

// The seed is recorded but does not influence any current mechanic.
Session new_session(std::shared_ptr<const StoryGraph> graph, std::uint64_t seed);

bool guard_passes(const Guard& g, const Session& s);
bool guards_pass(const std::vector<Guard>& gs, const Session& s);
void apply_effects(const std::vector<Effect>& effects, const StoryGraph& graph, Session& s);

// Indices (into the authored list) of options whose guards pass.
std::vector<std::size_t> visible_options(const Session& s);

struct StepResult {
    Session session;
    std::vector<EngineNote> notes;
    bool accepted = false;
};

// Throws SessionFinished once an ending has been acknowledged.
StepResult apply_event(const Session& session, const Event& event);

// ---------------------------------------------------------------------------
// View

struct ViewOption {
    std::size_t index = 0;          // what Choose takes
    std::size_t original_index = 0; // position in the authored list
    std::string label;
    bool operator==(const ViewOption&) const = default;
};

struct MeterReadout {
    std::string name;
    std::int64_t value = 0;
    std::int64_t min = 0;
    std::int64_t max = 0;
    bool operator==(const MeterReadout&) const = default;
};

struct BiolinkTile {
    Cell cell;
    std::string tile; // open | wall | trash | collected
    bool operator==(const BiolinkTile&) const = default;
};

struct BiolinkView {
    std::string creature;
    std::string meter;
    Cell position;
    std::int64_t visibility = 0;
    std::vector<BiolinkTile> tiles; // Chebyshev distance <= visibility, row-major
    std::int64_t collected = 0;
    std::int64_t required = 0;
    bool operator==(const BiolinkView&) const = default;
};

struct ScanMark {
    Cell cell;
    std::string mark; // empty | decoy | target
    bool operator==(const ScanMark&) const = default;
};

struct ScanView {
    std::int64_t width = 0;
    std::int64_t height = 0;
    std::vector<ScanMark> revealed;
    std::int64_t scans_used = 0;
    std::optional<std::int64_t> budget;
    bool operator==(const ScanView&) const = default;
};

struct CoordView {
    std::string buffer;
    std::int64_t attempts_used = 0;
    std::optional<std::int64_t> max_attempts;
    bool operator==(const CoordView&) const = default;
};

struct SequenceView {
    std::int64_t completed = 0;
    std::int64_t total = 0;
    std::vector<std::string> steps; // sorted, so the order is not revealed
    bool operator==(const SequenceView&) const = default;
};

using MiniView = std::variant<BiolinkView, ScanView, CoordView, SequenceView>;

struct View {
    std::string node;
    NodeKind kind = NodeKind::Narration;
    std::optional<MiniKind> game;
    std::string text;
    std::int64_t page = 0;
    std::int64_t page_count = 0;
    std::vector<ViewOption> options;
    std::vector<Channel> channels;
    std::vector<MeterReadout> meters;
    std::optional<MiniView> mini;
    std::optional<std::string> finished;
    std::optional<EndingKind> ending;
    bool operator==(const View&) const = default;
};

View view(const Session& session);

// ---------------------------------------------------------------------------
// Save / restore

inline constexpr std::int64_t kSaveFormatVersion = 1;

struct SaveState {
    std::int64_t version = kSaveFormatVersion;
    std::string story_hash;
    std::string node;
    std::set<std::string> flags;
    std::map<std::string, std::int64_t> inventory;
    std::map<std::string, std::int64_t> meters;
    std::int64_t page = 0;
    std::optional<MiniState> mini;
    std::uint64_t seed = 0;
    std::uint64_t event_count = 0;
    std::optional<std::string> finished;
    bool operator==(const SaveState&) const = default;
};

class HashMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedSave : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

SaveState save(const Session& session);
// Throws HashMismatch, UnsupportedVersion or MalformedSave.
Session restore(std::shared_ptr<const StoryGraph> graph, const SaveState& state);

// Sorted-key JSON; an absent mini-game is `{}`, an unfinished session has
// `"finished": null`.
std::string encode_save(const SaveState& state);
SaveState decode_save(std::string_view bytes);

} // namespace fuselage
