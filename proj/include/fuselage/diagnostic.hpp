#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fuselage {

enum class Severity { Error, Warning };

// Position of a token in a source file. Line and column are 1-based and
// counted in characters (code points), not bytes.
struct SourceSpan {
    std::string file;
    std::uint32_t line = 1;
    std::uint32_t column = 1;
    std::uint32_t length = 0;

    bool operator==(const SourceSpan&) const = default;
};

// A finding from the parser, checker, compiler or graph validator.
// Source-level findings carry a span; graph-level findings carry the
// offending identifier in `subject` instead.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    std::optional<SourceSpan> span;
    std::string subject;

    bool operator==(const Diagnostic&) const = default;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);
std::size_t error_count(const Diagnostics& diags);

// `file:line:col: error[code]: message`, or `error[code] (subject): message`
// when there is no span.
std::string format(const Diagnostic& d);

} // namespace fuselage
