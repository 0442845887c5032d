#include "doctest.h"

#include "fixtures.hpp"
#include "fuselage/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

using namespace fuselage;
using namespace fuselage::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "")
{
    std::istringstream in(input);
    std::ostringstream out, err;
    int code = cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_dir()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("fuselage-cli-" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_temp(const std::string& name, const std::string& content)
{
    fs::path p = temp_dir() / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
}

struct EnvGuard {
    explicit EnvGuard(const char* value) { ::setenv("FUSELAGE_STATE_BUDGET", value, 1); }
    ~EnvGuard() { ::unsetenv("FUSELAGE_STATE_BUDGET"); }
};

} // namespace

TEST_CASE("compile writes canonical bytes")
{
    std::string out = (temp_dir() / "mask.storyc.json").string();
    auto r = run({"compile", mask_path(), "-o", out});
    CHECK(r.code == 0);
    CHECK(read_file(out) == graph_encode(*mask_graph()));
    auto stdout_run = run({"compile", mask_path()});
    CHECK(stdout_run.code == 0);
    CHECK(stdout_run.out == graph_encode(*mask_graph()));
}

TEST_CASE("validate accepts source and compiled input")
{
    auto r = run({"validate", mask_path()});
    CHECK(r.code == 0);
    CHECK(r.out.find("ok (15 nodes)") != std::string::npos);
    std::string compiled = write_temp("m.storyc.json", graph_encode(*mask_graph()));
    CHECK(run({"validate", compiled}).code == 0);
}

TEST_CASE("broken story reports one unknown-target")
{
    std::string src = mask_source();
    auto pos = src.find("-> END-SUB-LEAVE");
    REQUIRE(pos != std::string::npos);
    src.replace(pos, 16, "-> Z-9");
    std::string path = write_temp("broken.story", src);
    auto r = run({"validate", path});
    CHECK(r.code == 1);
    std::size_t count = 0;
    for (auto p = r.err.find("unknown-target"); p != std::string::npos; p = r.err.find("unknown-target", p + 1))
        ++count;
    CHECK(count == 1);
    CHECK(run({"compile", path}).code == 1);
}

TEST_CASE("analyze exit codes and formats")
{
    auto table = run({"analyze", mask_path()});
    CHECK(table.code == 0);
    CHECK(table.out.find("END-MAIN") != std::string::npos);

    auto js = run({"analyze", mask_path(), "--json"});
    CHECK(js.code == 0);
    auto j = nlohmann::json::parse(js.out);
    CHECK(j["reachable"].size() == 15);

    auto dot = run({"analyze", mask_path(), "--dot"});
    CHECK(dot.code == 0);
    CHECK(dot.out.rfind("digraph", 0) == 0);

    std::string gated = write_temp("gated.story", "story \"t\" start A flag f\n"
        "node A choice { prompt \"p\" option \"a\" -> E option \"b\" if flag f -> X }\n"
        "node X ending sub { text \"x\" } node E ending main { text \"e\" }\n");
    CHECK(run({"analyze", gated}).code == 1);
}

TEST_CASE("the analyze script drives play to each ending")
{
    for (const char* end : {"END-MAIN", "END-SUB-LEAVE", "END-SUB-STOP"}) {
        auto script = run({"analyze", mask_path(), "--script", end});
        REQUIRE(script.code == 0);
        std::string save = (temp_dir() / "end.save.json").string();
        auto play = run({"play", mask_path(), "--save", save}, script.out);
        CHECK(play.code == 0);
        CHECK(play.out.find(end) != std::string::npos);
        SaveState st = decode_save(read_file(save));
        CHECK(st.finished == std::optional<std::string>(end));
    }
}

TEST_CASE("play resumes from a save")
{
    std::string save = (temp_dir() / "resume.save.json").string();
    auto first = run({"play", mask_path(), "--save", save}, "advance\nadvance\nquit\n");
    CHECK(first.code == 0);
    CHECK(decode_save(read_file(save)).node == "A-2");
    auto second = run({"play", mask_path(), "--load", save}, "2\nquit\n");
    CHECK(second.code == 0);
    CHECK(second.out.find("B-1") != std::string::npos);
}

TEST_CASE("usage errors exit 2")
{
    CHECK(run({}).code == 2);
    CHECK(run({"fly"}).code == 2);
    CHECK(run({"compile"}).code == 2);
    CHECK(run({"serve", mask_path(), "--port", "0"}).code == 2);
    CHECK(run({"serve", mask_path(), "--port", "70000"}).code == 2);
    CHECK(run({"analyze", mask_path(), "--json", "--dot"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("missing input is a content failure")
{
    auto r = run({"validate", (temp_dir() / "absent.story").string()});
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("state budget from the environment")
{
    {
        EnvGuard env("3");
        auto r = run({"analyze", mask_path()});
        CHECK(r.code == 1);
        CHECK(r.err.find("budget") != std::string::npos);
    }
    {
        EnvGuard env("lots");
        CHECK(run({"analyze", mask_path()}).code == 2);
    }
    {
        EnvGuard env("0");
        CHECK(run({"analyze", mask_path()}).code == 2);
    }
}

TEST_CASE("story ids and scripts")
{
    CHECK(cli::story_id_for("/a/b/mask.story") == "mask");
    CHECK(cli::story_id_for("mask.storyc.json") == "mask");
    CHECK(cli::story_id_for("x.json") == "x");
    analysis::Trace t = {{"A", touch(Advance{})}, {"B", handset(Key{" "})}, {"B", handset(Key{"N"})}};
    CHECK(cli::trace_to_script(t) == "advance\ntab\nkey space\nkey N\n");
}

TEST_CASE("the installed binary reports exit codes")
{
    auto status = [](const std::string& args) {
        std::string cmd = std::string(FUSELAGE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("validate " + mask_path()) == 0);
    CHECK(status("analyze " + mask_path()) == 0);
    CHECK(status("bogus") == 2);
    CHECK(status("validate /nonexistent.story") == 1);
}
