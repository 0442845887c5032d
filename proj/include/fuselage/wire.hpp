#pragma once

#include "fuselage/runtime.hpp"

#include "json.hpp"

#include <stdexcept>

// JSON forms of runtime values shared by the HTTP API and the CLI.
namespace fuselage::wire {

using json = nlohmann::json;

class MalformedEvent : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// `{channel:"touch"|"handset", type:"advance"|"choose"|"key"|"mini"|"ack", ...}`
// with `index` for choose, `symbol` for key, and `action` for mini
// (move-n|move-s|move-e|move-w|grab|wait|scan|submit|backspace|do; scan
// carries `x`,`y`, do carries `step`).
Event event_from_json(const json& j);
json event_to_json(const Event& e);

json view_to_json(const View& v);
json notes_to_json(const std::vector<EngineNote>& notes);
json mini_state_to_json(const std::optional<MiniState>& mini);
std::optional<MiniState> mini_state_from_json(const json& j);

std::string_view to_string(MiniAction::Kind k);
std::optional<MiniAction::Kind> mini_action_from_string(std::string_view s);

} // namespace fuselage::wire
