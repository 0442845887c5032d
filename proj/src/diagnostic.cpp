#include "fuselage/diagnostic.hpp"

#include <algorithm>

namespace fuselage {

bool has_errors(const Diagnostics& diags)
{
    return error_count(diags) > 0;
}

std::size_t error_count(const Diagnostics& diags)
{
    return static_cast<std::size_t>(std::count_if(diags.begin(), diags.end(),
        [](const Diagnostic& d) { return d.severity == Severity::Error; }));
}

std::string format(const Diagnostic& d)
{
    const char* sev = d.severity == Severity::Error ? "error" : "warning";
    std::string out;
    if (d.span) {
        out += d.span->file.empty() ? std::string("<input>") : d.span->file;
        out += ':' + std::to_string(d.span->line) + ':' + std::to_string(d.span->column) + ": ";
        out += sev;
        out += '[' + d.code + "]: ";
    } else {
        out += sev;
        out += '[' + d.code + ']';
        if (!d.subject.empty())
            out += " (" + d.subject + ')';
        out += ": ";
    }
    out += d.message;
    return out;
}

} // namespace fuselage
