#pragma once

#include "fuselage/analysis.hpp"
#include "fuselage/compile.hpp"
#include "fuselage/runtime.hpp"

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fuselage::testing {

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string mask_path()
{
    return std::string(FUSELAGE_ASSET_DIR) + "/mask.story";
}

inline std::string mask_source()
{
    return read_file(mask_path());
}

inline std::shared_ptr<const StoryGraph> mask_graph()
{
    static const auto graph = [] {
        auto r = compile(mask_source(), "mask.story");
        if (!r.graph)
            throw std::runtime_error("mask.story does not compile");
        return std::make_shared<const StoryGraph>(std::move(*r.graph));
    }();
    return graph;
}

inline Session replay(Session s, const analysis::Trace& trace)
{
    for (const auto& step : trace)
        s = apply_event(s, step.event).session;
    return s;
}

inline Event touch(EventPayload p) { return {Channel::Touch, std::move(p)}; }
inline Event handset(EventPayload p) { return {Channel::Handset, std::move(p)}; }
inline MiniAction act(MiniAction::Kind k) { return {k, {}, {}}; }
inline MiniAction scan_at(std::int64_t x, std::int64_t y) { return {MiniAction::Kind::Scan, {x, y}, {}}; }
inline MiniAction step(std::string id) { return {MiniAction::Kind::Do, {}, std::move(id)}; }

inline bool has_note(const std::vector<EngineNote>& notes, const std::string& code)
{
    for (const auto& n : notes)
        if (n.code == code)
            return true;
    return false;
}

inline bool has_code(const Diagnostics& diags, const std::string& code)
{
    for (const auto& d : diags)
        if (d.code == code)
            return true;
    return false;
}

} // namespace fuselage::testing
