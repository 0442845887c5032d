#pragma once

#include "fuselage/diagnostic.hpp"
#include "fuselage/dsl.hpp"
#include "fuselage/story.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace fuselage {

struct CompileResult {
    std::optional<StoryGraph> graph; // present iff no errors
    Diagnostics diagnostics;         // errors and warnings from every stage
};

// parse -> check -> lower -> graph_validate -> inventory abstraction check.
CompileResult compile(std::string_view source, std::string file = {});

// Lowers an already-checked Ast. Applies channel defaults.
StoryGraph lower(const dsl::Ast& ast);

} // namespace fuselage
