#include "fuselage/cli.hpp"

#include "fuselage/compile.hpp"
#include "fuselage/runtime.hpp"
#include "fuselage/server.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fuselage::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<std::string> read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

analysis::Options analysis_options()
{
    analysis::Options opts;
    if (const char* env = std::getenv("FUSELAGE_STATE_BUDGET")) {
        std::string_view v(env);
        std::size_t n = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
        if (ec != std::errc() || p != v.data() + v.size() || n == 0)
            throw UsageError("FUSELAGE_STATE_BUDGET must be a positive integer");
        opts.state_budget = n;
    }
    return opts;
}

void print_diagnostics(const Diagnostics& diags, std::ostream& err)
{
    for (const auto& d : diags)
        err << format(d) << "\n";
}

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// ---------------------------------------------------------------------------
// play

void render(const View& v, Channel channel, std::ostream& out)
{
    out << "\n== " << v.node << " (" << to_string(v.kind);
    if (v.game)
        out << ": " << to_string(*v.game);
    out << ") ==\n";
    if (!v.text.empty())
        out << v.text << "\n";
    if (v.kind == NodeKind::Narration && v.page_count > 1)
        out << "[page " << v.page + 1 << "/" << v.page_count << "]\n";
    for (const auto& o : v.options)
        out << "  " << o.index + 1 << ") " << o.label << "\n";

    if (v.mini) {
        std::visit([&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BiolinkView>) {
                out << "bio-link: " << m.creature << "  trash " << m.collected << "/" << m.required << "\n";
                for (std::int64_t y = m.position.y - m.visibility; y <= m.position.y + m.visibility; ++y) {
                    std::string row;
                    for (std::int64_t x = m.position.x - m.visibility; x <= m.position.x + m.visibility; ++x) {
                        char c = ' ';
                        for (const auto& t : m.tiles) {
                            if (t.cell == Cell{x, y}) {
                                c = t.tile == "wall" ? '#' : t.tile == "trash" ? 'T' : '.';
                                break;
                            }
                        }
                        if (Cell{x, y} == m.position)
                            c = '@';
                        row += c;
                    }
                    out << "  " << row << "\n";
                }
            } else if constexpr (std::is_same_v<T, ScanView>) {
                out << "scan " << m.width << "x" << m.height << "  used " << m.scans_used;
                if (m.budget)
                    out << "/" << *m.budget;
                out << "\n";
                for (std::int64_t y = 0; y < m.height; ++y) {
                    std::string row;
                    for (std::int64_t x = 0; x < m.width; ++x) {
                        char c = '?';
                        for (const auto& r : m.revealed)
                            if (r.cell == Cell{x, y})
                                c = r.mark == "target" ? 'X' : r.mark == "decoy" ? 'd' : '.';
                        row += c;
                    }
                    out << "  " << row << "\n";
                }
            } else if constexpr (std::is_same_v<T, CoordView>) {
                out << "coordinates: [" << m.buffer << "]  attempts " << m.attempts_used;
                if (m.max_attempts)
                    out << "/" << *m.max_attempts;
                out << "\n";
            } else {
                out << "sequence " << m.completed << "/" << m.total << ":";
                for (const auto& s : m.steps)
                    out << " " << s;
                out << "\n";
            }
        }, *v.mini);
    }
    for (const auto& m : v.meters)
        out << m.name << ": " << m.value << " [" << m.min << ".." << m.max << "]\n";
    out << "accepts:";
    for (auto c : v.channels)
        out << " " << to_string(c);
    out << "\n";
    if (v.ending)
        out << "THE END (" << to_string(*v.ending) << " ending)" << (v.finished ? "" : "  -- type 'ack'") << "\n";
    out << "[" << to_string(channel) << "]> " << std::flush;
}

// Maps one command line to events. Returns false for an unrecognized line.
bool parse_command(const std::string& line, Channel channel, std::vector<Event>& events)
{
    std::istringstream in(line);
    std::string cmd;
    in >> cmd;
    std::transform(cmd.begin(), cmd.end(), cmd.begin(), [](unsigned char c) { return std::tolower(c); });
    auto mini = [&](MiniAction::Kind k) { events.push_back({channel, MiniAction{k, {}, {}}}); };

    if (cmd.empty() || cmd == "advance" || cmd == "a") {
        events.push_back({channel, Advance{}});
    } else if (std::all_of(cmd.begin(), cmd.end(), ::isdigit)) {
        std::int64_t n = 0;
        std::from_chars(cmd.data(), cmd.data() + cmd.size(), n);
        events.push_back({channel, Choose{n - 1}});
    } else if (cmd == "ack") {
        events.push_back({channel, Ack{}});
    } else if (cmd == "move") {
        std::string dir;
        in >> dir;
        if (dir == "n") mini(MiniAction::Kind::MoveN);
        else if (dir == "s") mini(MiniAction::Kind::MoveS);
        else if (dir == "e") mini(MiniAction::Kind::MoveE);
        else if (dir == "w") mini(MiniAction::Kind::MoveW);
        else return false;
    } else if (cmd == "grab") {
        mini(MiniAction::Kind::Grab);
    } else if (cmd == "wait") {
        mini(MiniAction::Kind::Wait);
    } else if (cmd == "submit") {
        mini(MiniAction::Kind::Submit);
    } else if (cmd == "backspace") {
        mini(MiniAction::Kind::Backspace);
    } else if (cmd == "scan") {
        std::int64_t x = 0, y = 0;
        if (!(in >> x >> y))
            return false;
        events.push_back({channel, MiniAction{MiniAction::Kind::Scan, {x, y}, {}}});
    } else if (cmd == "do") {
        std::string step;
        if (!(in >> step))
            return false;
        events.push_back({channel, MiniAction{MiniAction::Kind::Do, {}, step}});
    } else if (cmd == "key") {
        std::string sym;
        if (!(in >> sym))
            return false;
        events.push_back({channel, Key{sym == "space" ? " " : sym}});
    } else if (cmd == "type") {
        std::string rest;
        std::getline(in, rest);
        for (char c : trim(rest))
            events.push_back({channel, Key{std::string(1, c)}});
    } else {
        return false;
    }
    return true;
}

void write_save(const Session& s, const std::string& path, std::ostream& out, std::ostream& err)
{
    std::ofstream f(path, std::ios::binary);
    f << encode_save(save(s));
    if (f)
        out << "saved to " << path << "\n";
    else
        err << "error: cannot write " << path << "\n";
}

int play(const std::string& path, std::uint64_t seed, const std::string& save_path, const std::string& load_path,
    std::istream& in, std::ostream& out, std::ostream& err)
{
    auto graph = load_story(path, err);
    if (!graph)
        return kContentFailure;
    auto shared = std::make_shared<const StoryGraph>(std::move(*graph));
    Session s = new_session(shared, seed);
    if (!load_path.empty()) {
        auto bytes = read_file(load_path);
        if (!bytes) {
            err << "error: cannot read " << load_path << "\n";
            return kContentFailure;
        }
        try {
            s = restore(shared, decode_save(*bytes));
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kContentFailure;
        }
    }

    Channel channel = Channel::Touch;
    out << shared->title << "\n"
        << "commands: tab, advance, <n>, ack, move n|s|e|w, grab, wait, scan X Y, do STEP,\n"
        << "          key SYM, type TEXT, submit, backspace, save, quit\n";
    render(view(s), channel, out);

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::string cmd = trim(line);
        if (line == "\t" || cmd == "tab") {
            channel = channel == Channel::Touch ? Channel::Handset : Channel::Touch;
            out << "channel: " << to_string(channel) << "\n[" << to_string(channel) << "]> " << std::flush;
            continue;
        }
        if (cmd == "quit" || cmd == "q")
            break;
        if (cmd == "save") {
            if (save_path.empty())
                err << "error: no --save file given\n";
            else
                write_save(s, save_path, out, err);
            out << "[" << to_string(channel) << "]> " << std::flush;
            continue;
        }
        std::vector<Event> events;
        if (!parse_command(cmd, channel, events)) {
            out << "? unrecognized command\n[" << to_string(channel) << "]> " << std::flush;
            continue;
        }
        for (const auto& e : events) {
            StepResult r;
            try {
                r = apply_event(s, e);
            } catch (const SessionFinished&) {
                out << "the story is over\n";
                break;
            }
            s = std::move(r.session);
            for (const auto& n : r.notes)
                out << "! " << n.code << ": " << n.message << "\n";
        }
        render(view(s), channel, out);
        if (s.finished)
            break;
    }
    out << "\n";
    if (!save_path.empty())
        write_save(s, save_path, out, err);
    return kOk;
}

// ---------------------------------------------------------------------------
// script rendering

std::string command_for(const Event& e)
{
    return std::visit([](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Advance>) {
            return "advance";
        } else if constexpr (std::is_same_v<T, Choose>) {
            return std::to_string(p.index + 1);
        } else if constexpr (std::is_same_v<T, Ack>) {
            return "ack";
        } else if constexpr (std::is_same_v<T, Key>) {
            return "key " + (p.symbol == " " ? std::string("space") : p.symbol);
        } else {
            switch (p.kind) {
            case MiniAction::Kind::MoveN: return "move n";
            case MiniAction::Kind::MoveS: return "move s";
            case MiniAction::Kind::MoveE: return "move e";
            case MiniAction::Kind::MoveW: return "move w";
            case MiniAction::Kind::Grab: return "grab";
            case MiniAction::Kind::Wait: return "wait";
            case MiniAction::Kind::Scan: return "scan " + std::to_string(p.cell.x) + " " + std::to_string(p.cell.y);
            case MiniAction::Kind::Submit: return "submit";
            case MiniAction::Kind::Backspace: return "backspace";
            case MiniAction::Kind::Do: return "do " + p.step;
            }
            return "";
        }
    }, e.payload);
}

} // namespace

std::string trace_to_script(const analysis::Trace& trace)
{
    std::string out;
    Channel channel = Channel::Touch;
    for (const auto& step : trace) {
        if (step.event.channel != channel) {
            out += "tab\n";
            channel = step.event.channel;
        }
        out += command_for(step.event) + "\n";
    }
    return out;
}

std::string story_id_for(const std::string& path)
{
    std::string name = std::filesystem::path(path).filename().string();
    for (std::string_view suffix : {".storyc.json", ".story", ".json"})
        if (ends_with(name, suffix))
            return name.substr(0, name.size() - suffix.size());
    return name;
}

std::optional<StoryGraph> load_story(const std::string& path, std::ostream& err)
{
    auto bytes = read_file(path);
    if (!bytes) {
        err << "error: cannot read " << path << "\n";
        return std::nullopt;
    }
    auto first = bytes->find_first_not_of(" \t\r\n");
    if (ends_with(path, ".json") || (first != std::string::npos && (*bytes)[first] == '{')) {
        try {
            return graph_decode(*bytes);
        } catch (const InvalidGraph& e) {
            print_diagnostics(e.diagnostics(), err);
        } catch (const std::exception& e) {
            err << path << ": error: " << e.what() << "\n";
        }
        return std::nullopt;
    }
    auto result = compile(*bytes, path);
    print_diagnostics(result.diagnostics, err);
    return std::move(result.graph);
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"fuselage: compile, check, analyze, play and serve branching stories"};
    app.require_subcommand(1);

    std::string input, output;
    auto* compile_cmd = app.add_subcommand("compile", "Compile a .story file to canonical .storyc.json");
    compile_cmd->add_option("input", input, "source .story file")->required();
    compile_cmd->add_option("-o,--output", output, "output file (default: standard output)");

    auto* validate_cmd = app.add_subcommand("validate", "Check a story without writing output");
    validate_cmd->add_option("input", input, "story file")->required();

    std::uint64_t seed = 0;
    std::string save_path, load_path;
    auto* play_cmd = app.add_subcommand("play", "Play a story in text mode (TAB toggles touch/handset)");
    play_cmd->add_option("input", input, "story file")->required();
    play_cmd->add_option("--seed", seed, "session seed");
    play_cmd->add_option("--save", save_path, "write a save here on 'save' and on exit");
    play_cmd->add_option("--load", load_path, "resume from a save file");

    bool as_json = false, as_dot = false;
    std::string script_target;
    auto* analyze_cmd = app.add_subcommand("analyze", "Report reachability, dead nodes and ending traces");
    analyze_cmd->add_option("input", input, "story file")->required();
    auto* json_flag = analyze_cmd->add_flag("--json", as_json, "print the report as JSON");
    analyze_cmd->add_flag("--dot", as_dot, "print the story graph in DOT format")->excludes(json_flag);
    analyze_cmd->add_option("--script", script_target, "print play commands reaching this node")
        ->excludes(json_flag);

    std::vector<std::string> inputs;
    int port = 8080;
    std::string static_dir;
    std::int64_t ttl = 24 * 3600;
    auto* serve_cmd = app.add_subcommand("serve", "Serve stories over the JSON API");
    serve_cmd->add_option("inputs", inputs, "story files")->required();
    serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
    serve_cmd->add_option("--static", static_dir, "directory served at /")->check(CLI::ExistingDirectory);
    serve_cmd->add_option("--ttl", ttl, "idle seconds before a session expires")->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*compile_cmd) {
            auto graph = load_story(input, err);
            if (!graph)
                return kContentFailure;
            std::string bytes = graph_encode(*graph);
            if (output.empty()) {
                out << bytes;
            } else {
                std::ofstream f(output, std::ios::binary);
                f << bytes;
                if (!f) {
                    err << "error: cannot write " << output << "\n";
                    return kContentFailure;
                }
            }
            return kOk;
        }
        if (*validate_cmd) {
            auto graph = load_story(input, err);
            if (!graph)
                return kContentFailure;
            out << input << ": ok (" << graph->nodes.size() << " nodes)\n";
            return kOk;
        }
        if (*play_cmd)
            return play(input, seed, save_path, load_path, in, out, err);
        if (*analyze_cmd) {
            auto opts = analysis_options();
            auto graph = load_story(input, err);
            if (!graph)
                return kContentFailure;
            if (as_dot) {
                out << analysis::to_dot(*graph);
                return kOk;
            }
            if (!script_target.empty()) {
                if (!graph->find(script_target)) {
                    err << "error: no node '" << script_target << "'\n";
                    return kContentFailure;
                }
                auto trace = analysis::trace_to(*graph, script_target, opts);
                if (!trace) {
                    err << "error: no playthrough reaches '" << script_target << "'\n";
                    return kContentFailure;
                }
                out << trace_to_script(*trace);
                if (graph->at(script_target).kind() == NodeKind::Ending)
                    out << "ack\n";
                return kOk;
            }
            auto report = analysis::analyze(*graph, opts);
            if (as_json)
                out << analysis::report_to_json(report).dump() << "\n";
            else
                out << analysis::report_table(*graph, report);
            return report.ok() ? kOk : kContentFailure;
        }
        if (*serve_cmd) {
            std::vector<server::StoryEntry> stories;
            for (const auto& path : inputs) {
                auto graph = load_story(path, err);
                if (!graph)
                    return kContentFailure;
                stories.push_back({story_id_for(path), std::make_shared<const StoryGraph>(std::move(*graph))});
            }
            server::Config config;
            config.ttl = std::chrono::seconds(ttl);
            server::Api api(std::move(stories), config);
            server::HttpServer http(api, static_dir.empty() ? std::nullopt : std::optional(std::filesystem::path(static_dir)));
            if (http.bind("0.0.0.0", port) < 0) {
                err << "error: cannot bind port " << port << "\n";
                return kContentFailure;
            }
            out << "serving on http://localhost:" << port << "/\n" << std::flush;
            return http.listen() ? kOk : kContentFailure;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const analysis::StateBudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kContentFailure;
    }
    return kUsage;
}

} // namespace fuselage::cli
