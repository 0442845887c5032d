#pragma once

#include "fuselage/diagnostic.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fuselage {

enum class NodeKind { Narration, Choice, MiniGame, Ending };
enum class Channel { Touch, Handset, Any };
enum class MiniKind { Biolink, Scan, Coord, Sequence };
enum class EndingKind { Main, Sub };
enum class Cmp { Less, LessEq, Equal, GreaterEq, Greater };

std::string_view to_string(NodeKind k);
std::string_view to_string(Channel c);
std::string_view to_string(MiniKind k);
std::string_view to_string(EndingKind k);
std::string_view to_string(Cmp c);

std::optional<Channel> channel_from_string(std::string_view s);
std::optional<MiniKind> mini_kind_from_string(std::string_view s);
std::optional<EndingKind> ending_kind_from_string(std::string_view s);
std::optional<Cmp> cmp_from_string(std::string_view s);

bool compare(std::int64_t lhs, Cmp op, std::int64_t rhs);

// `[A-Za-z][A-Za-z0-9-]*`
bool is_valid_identifier(std::string_view id);

struct MeterDef {
    std::string name;
    std::int64_t min = 0;
    std::int64_t max = 0;
    std::int64_t init = 0;

    std::int64_t clamp(std::int64_t v) const { return v < min ? min : (v > max ? max : v); }
    bool operator==(const MeterDef&) const = default;
};

struct ItemDef {
    std::string name;
    std::optional<std::string> label;
    bool operator==(const ItemDef&) const = default;
};

struct Guard {
    enum class Kind { FlagSet, FlagClear, ItemHeld, Meter };
    Kind kind = Kind::FlagSet;
    std::string name;
    Cmp cmp = Cmp::Equal;
    std::int64_t value = 0;
    bool operator==(const Guard&) const = default;
};

struct Effect {
    enum class Kind { SetFlag, ClearFlag, GiveItem, TakeItem, MeterDelta };
    Kind kind = Kind::SetFlag;
    std::string name;
    std::int64_t delta = 0;
    bool operator==(const Effect&) const = default;
};

struct Cell {
    std::int64_t x = 0;
    std::int64_t y = 0;
    auto operator<=>(const Cell&) const = default;
};

// Mini-game defaults, applied by the compiler when the author omits a key.
inline constexpr std::int64_t kDefaultCommandCost = 5;
inline constexpr std::int64_t kDefaultIdleRegen = 2;
inline constexpr std::int64_t kDefaultLossThreshold = 0;
inline constexpr std::int64_t kDefaultVisibility = 2;
// Collected trash is tracked as a 64-bit set.
inline constexpr std::size_t kMaxBiolinkTrash = 64;

struct BiolinkParams {
    std::string creature;
    std::vector<std::string> grid; // rows over {'.', 'T', '#', 'S'}
    std::int64_t command_cost = kDefaultCommandCost;
    std::int64_t idle_regen = kDefaultIdleRegen;
    std::int64_t loss_threshold = kDefaultLossThreshold;
    std::string meter;
    std::int64_t required_trash = 0;
    std::int64_t visibility = kDefaultVisibility;

    std::int64_t width() const { return grid.empty() ? 0 : static_cast<std::int64_t>(grid.front().size()); }
    std::int64_t height() const { return static_cast<std::int64_t>(grid.size()); }
    bool in_bounds(Cell c) const;
    char at(Cell c) const;
    Cell start() const;
    // Trash cells in row-major order; a cell's index here is its bit in
    // the collected set.
    std::vector<Cell> trash_cells() const;
    bool operator==(const BiolinkParams&) const = default;
};

struct ScanParams {
    std::int64_t width = 1;
    std::int64_t height = 1;
    Cell target;
    std::vector<Cell> decoys;
    std::optional<std::int64_t> budget;

    bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
    bool operator==(const ScanParams&) const = default;
};

// Handset keypad: digits, '.', '-', the compass letters, plus a space key
// as field separator. Letters are accepted in either case.
inline constexpr std::size_t kCoordBufferCap = 32;
bool is_keypad_symbol(char c);
// Trim, collapse internal whitespace runs to one space, ASCII uppercase.
std::string normalize_coordinate(std::string_view s);

struct CoordParams {
    std::string expected;
    std::optional<std::int64_t> max_attempts;
    bool operator==(const CoordParams&) const = default;
};

struct SequenceStep {
    std::string id;
    Channel channel = Channel::Touch;
    bool operator==(const SequenceStep&) const = default;
};

struct SequenceParams {
    std::vector<SequenceStep> steps;
    bool operator==(const SequenceParams&) const = default;
};

using MiniGameParams = std::variant<BiolinkParams, ScanParams, CoordParams, SequenceParams>;
MiniKind kind_of(const MiniGameParams& p);

struct ParamProblem {
    std::string code;
    std::string message;
};

// Invariant checks for one mini-game's parameters, shared by the graph
// validator and the source checker.
std::vector<ParamProblem> check_minigame_params(const MiniGameParams& params, const std::vector<MeterDef>& meters);

struct Option {
    std::string label;
    std::vector<Guard> guards;
    std::string target;
    std::vector<Effect> effects;
    bool operator==(const Option&) const = default;
};

struct NarrationBody {
    std::vector<std::string> pages;
    std::string next;
    std::vector<Effect> effects;
    bool operator==(const NarrationBody&) const = default;
};

struct ChoiceBody {
    std::string prompt;
    std::vector<Option> options;
    bool operator==(const ChoiceBody&) const = default;
};

struct MiniGameBody {
    MiniGameParams params;
    std::string success;
    std::string failure;
    bool operator==(const MiniGameBody&) const = default;
};

struct EndingBody {
    EndingKind kind = EndingKind::Main;
    std::string text;
    bool operator==(const EndingBody&) const = default;
};

using NodeBody = std::variant<NarrationBody, ChoiceBody, MiniGameBody, EndingBody>;

struct Node {
    std::string id;
    Channel channel = Channel::Touch;
    NodeBody body;

    NodeKind kind() const { return static_cast<NodeKind>(body.index()); }
    bool accepts(Channel c) const { return channel == Channel::Any || channel == c; }
    // Edge targets in authored order (duplicates kept).
    std::vector<std::string> targets() const;
    bool operator==(const Node&) const = default;
};

Channel default_channel(const NodeBody& body);

struct StoryGraph {
    std::string title;
    std::int64_t version = 1;
    std::string start;
    std::vector<MeterDef> meters;
    std::vector<ItemDef> items;
    std::vector<std::string> flags;
    std::map<std::string, Node> nodes;

    const Node* find(std::string_view id) const;
    const Node& at(std::string_view id) const;
    const MeterDef* meter(std::string_view name) const;
    bool operator==(const StoryGraph&) const = default;
};

inline constexpr std::int64_t kGraphFormatVersion = 1;

// Checks every structural invariant. Diagnostics are sorted by subject
// (node id or declaration name), then code.
Diagnostics graph_validate(const StoryGraph& graph);

class MalformedInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedVersion : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGraph : public std::runtime_error {
public:
    explicit InvalidGraph(Diagnostics diags);
    const Diagnostics& diagnostics() const noexcept { return diags_; }

private:
    Diagnostics diags_;
};

// Canonical `.storyc.json` bytes: compact JSON, sorted keys, trailing LF.
// Throws InvalidGraph if the graph does not validate.
std::string graph_encode(const StoryGraph& graph);
StoryGraph graph_decode(std::string_view bytes);

// Lowercase hex SHA-256 over graph_encode(graph).
std::string content_hash(const StoryGraph& graph);
std::string sha256_hex(std::string_view bytes);

} // namespace fuselage
