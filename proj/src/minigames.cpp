#include "fuselage/runtime.hpp"

#include <algorithm>
#include <limits>

namespace fuselage {

namespace {

std::int64_t saturating_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r))
        return b > 0 ? std::numeric_limits<std::int64_t>::max() : std::numeric_limits<std::int64_t>::min();
    return r;
}

} // namespace

MiniState initial_mini_state(const MiniGameParams& params)
{
    switch (kind_of(params)) {
    case MiniKind::Biolink: return BiolinkState{std::get<BiolinkParams>(params).start(), {}};
    case MiniKind::Scan: return ScanState{};
    case MiniKind::Coord: return CoordState{};
    case MiniKind::Sequence: return SequenceState{};
    }
    return SequenceState{};
}

MiniStep<BiolinkState> biolink_update(const BiolinkParams& params, const BiolinkState& state,
    std::int64_t meter, const MeterDef& meter_def, BiolinkAction action)
{
    MiniStep<BiolinkState> out;
    out.state = state;
    std::int64_t delta = -params.command_cost;
    switch (action) {
    case BiolinkAction::MoveN:
    case BiolinkAction::MoveS:
    case BiolinkAction::MoveE:
    case BiolinkAction::MoveW: {
        Cell to = state.position;
        if (action == BiolinkAction::MoveN) --to.y;
        if (action == BiolinkAction::MoveS) ++to.y;
        if (action == BiolinkAction::MoveE) ++to.x;
        if (action == BiolinkAction::MoveW) --to.x;
        if (params.in_bounds(to) && params.at(to) != '#')
            out.state.position = to;
        else
            out.notes.push_back({"blocked", "the way is blocked"});
        break;
    }
    case BiolinkAction::Grab:
        if (params.at(state.position) == 'T' && !state.collected.count(state.position)) {
            out.state.collected.insert(state.position);
            out.notes.push_back({"collected", "trash collected"});
        }
        break;
    case BiolinkAction::Wait:
        delta = params.idle_regen;
        break;
    }
    out.meter = meter_def.clamp(saturating_add(meter, delta));

    if (out.meter <= params.loss_threshold) {
        out.outcome = MiniOutcome::Failure;
        out.notes.push_back({"control-lost", "the creature's free will takes over; control lost"});
    } else if (static_cast<std::int64_t>(out.state.collected.size()) >= params.required_trash) {
        out.outcome = MiniOutcome::Success;
    }
    return out;
}

MiniStep<ScanState> scan_update(const ScanParams& params, const ScanState& state, Cell cell)
{
    MiniStep<ScanState> out;
    out.state = state;
    if (!params.in_bounds(cell)) {
        out.accepted = false;
        out.notes.push_back({"out-of-bounds", "that cell is outside the scan area"});
        return out;
    }
    if (state.revealed.count(cell)) {
        out.accepted = false;
        out.notes.push_back({"already-scanned", "that cell was already scanned"});
        return out;
    }
    out.state.revealed.insert(cell);
    ++out.state.scans_used;
    if (cell == params.target) {
        out.outcome = MiniOutcome::Success;
        out.notes.push_back({"target", "suspicious object found"});
        return out;
    }
    if (std::find(params.decoys.begin(), params.decoys.end(), cell) != params.decoys.end())
        out.notes.push_back({"decoy", "something is there, but it is not what you are looking for"});
    else
        out.notes.push_back({"empty", "nothing found"});
    if (params.budget && out.state.scans_used > *params.budget) {
        out.outcome = MiniOutcome::Failure;
        out.notes.push_back({"scan-budget", "scan budget exhausted"});
    }
    return out;
}

MiniStep<CoordState> coord_update(const CoordParams& params, const CoordState& state,
    CoordInput input, std::string_view symbol)
{
    MiniStep<CoordState> out;
    out.state = state;
    switch (input) {
    case CoordInput::Key:
        if (symbol.size() != 1 || !is_keypad_symbol(symbol.front())) {
            out.accepted = false;
            out.notes.push_back({"bad-key", "that key is not on the handset keypad"});
        } else if (state.buffer.size() >= kCoordBufferCap) {
            out.accepted = false;
            out.notes.push_back({"buffer-full", "the coordinate field is full"});
        } else {
            out.state.buffer += symbol;
        }
        break;
    case CoordInput::Backspace:
        if (state.buffer.empty()) {
            out.accepted = false;
            out.notes.push_back({"buffer-empty", "nothing to erase"});
        } else {
            out.state.buffer.pop_back();
        }
        break;
    case CoordInput::Submit:
        if (normalize_coordinate(state.buffer) == normalize_coordinate(params.expected)) {
            out.outcome = MiniOutcome::Success;
            out.notes.push_back({"coordinates-accepted", "coordinates accepted"});
        } else {
            ++out.state.attempts_used;
            out.state.buffer.clear();
            out.notes.push_back({"coordinates-rejected", "coordinates rejected"});
            if (params.max_attempts && out.state.attempts_used >= *params.max_attempts)
                out.outcome = MiniOutcome::Failure;
        }
        break;
    }
    return out;
}

MiniStep<SequenceState> sequence_update(const SequenceParams& params, const SequenceState& state,
    std::string_view step, Channel channel)
{
    MiniStep<SequenceState> out;
    out.state = state;
    bool known = std::any_of(params.steps.begin(), params.steps.end(),
        [&](const SequenceStep& s) { return s.id == step; });
    if (!known) {
        out.accepted = false;
        out.notes.push_back({"unknown-step", "nothing to do with that"});
        return out;
    }
    const auto idx = static_cast<std::size_t>(state.next_step);
    if (idx < params.steps.size()) {
        const SequenceStep& want = params.steps[idx];
        if (want.id == step && (want.channel == Channel::Any || want.channel == channel)) {
            ++out.state.next_step;
            if (static_cast<std::size_t>(out.state.next_step) == params.steps.size())
                out.outcome = MiniOutcome::Success;
            return out;
        }
    }
    out.accepted = false;
    out.notes.push_back({"not-yet", "not yet"});
    return out;
}

} // namespace fuselage
