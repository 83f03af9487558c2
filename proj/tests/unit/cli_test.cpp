#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nonbloch/config.hpp"
#include "nonbloch/plot.hpp"
#include "nonbloch/runner.hpp"

namespace fs = std::filesystem;
using namespace nonbloch;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nonbloch_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config rejects unknown keys with their path") {
    CHECK_THROWS_WITH(parse_config(json::parse(R"({"preset":"fig2a","bogus":1})")),
                      doctest::Contains("bogus"));
    CHECK_THROWS_WITH(parse_config(json::parse(R"({"preset":"fig2a","time":{"dtt":0.1}})")),
                      doctest::Contains("config.time: unknown key 'dtt'"));
    CHECK_THROWS(parse_config(json::parse(R"({"preset":"nope"})")));
}

TEST_CASE("config round trip") {
    const auto c = parse_config(json::parse(R"({"preset":"fig2b","tasks":["spectra"],"L":60})"));
    CHECK(c.cells == 60);
    CHECK(!c.preset_defaults);
    // the resolved record carries the model, so it parses without the preset
    json j = config_to_json(c);
    j.erase("preset");
    const auto again = parse_config(j);
    CHECK(again.symbol.entry(0, 0) == c.symbol.entry(0, 0));
    CHECK(again.cells == 60);
    CHECK(again.tasks == c.tasks);
}

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("empty task list writes only the manifest") {
    auto c = preset_config("fig2a", {});
    c.tasks.clear();
    c.out = scratch("empty").string();
    const auto r = run_experiment(c);
    CHECK(r.tasks.empty());
    CHECK(!r.failed());
}

TEST_CASE("runs are deterministic") {
    auto c = preset_config("fig2b", {"spectra", "saddles"});
    c.cells = 60;
    c.preset_defaults = false;
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    c.out = a.string();
    REQUIRE(!run_experiment(c).failed());
    c.out = b.string();
    c.threads = 1;
    REQUIRE(!run_experiment(c).failed());
    int compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        const fs::path other = b / fs::relative(e.path(), a);
        CHECK(slurp(e.path()) == slurp(other));
        ++compared;
    }
    CHECK(compared >= 3);
}

TEST_CASE("plot names the bad line of a malformed CSV") {
    const fs::path d = scratch("plot");
    {
        std::ofstream f(d / "bad.csv");
        f << "t,x,amplitude\n0,1,2\n3,4\n";
    }
    CHECK_THROWS_WITH(plot_file(d / "bad.csv", d), doctest::Contains("bad.csv:3"));
}

TEST_CASE("plot renders a trace") {
    const fs::path d = scratch("plot_ok");
    {
        std::ofstream f(d / "trace.csv");
        f << "t,amp_x0,norm,ln_amp_x0,ln_norm\n";
        for (int j = 0; j < 50; ++j) f << j * 0.1 << ",1,1," << -0.1 * j << ",0\n";
    }
    const auto svg = plot_file(d / "trace.csv", d);
    CHECK(fs::exists(svg));
    CHECK(slurp(svg).find("<svg") != std::string::npos);
}

}  // TEST_SUITE
