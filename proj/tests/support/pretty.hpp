#pragma once

#include "fuselage/dsl.hpp"

#include <string>

namespace fuselage::testing {

// Prints an Ast back as source. Layout is fixed, so spans differ from the
// original but the structure survives a re-parse.
std::string pretty(const dsl::Ast& ast);

// Structural equality ignoring source spans.
bool same_ast(const dsl::Ast& a, const dsl::Ast& b);

} // namespace fuselage::testing
