#pragma once

#include "fuselage/analysis.hpp"
#include "fuselage/story.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fuselage::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kContentFailure = 1;
inline constexpr int kUsage = 2;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

// Loads a `.story` source or a compiled `.storyc.json` graph. Diagnostics
// go to `err`; nullopt on any failure.
std::optional<StoryGraph> load_story(const std::string& path, std::ostream& err);

// Story id used by `serve`: the file name without `.storyc.json` or `.story`.
std::string story_id_for(const std::string& path);

// Renders a trace as `play` commands, switching channels with `tab`.
std::string trace_to_script(const analysis::Trace& trace);

} // namespace fuselage::cli
