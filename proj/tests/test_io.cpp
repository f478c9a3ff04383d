#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "psep/artifacts.hpp"
#include "psep/config.hpp"
#include "psep/pipeline.hpp"

using namespace psep;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("psep-test-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

bool mentions(const io::ConfigError& e, const std::string& text)
{
    for (const auto& s : e.problems())
        if (s.find(text) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("shortest round-trip number formatting")
{
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1e-12) == "1e-12");
    CHECK(io::format_double(2.0) == "2");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, double(i % 40) - 20.0);
        const std::string s = io::format_double(x);
        double y = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), y);
        CHECK(y == x);
    }
}

TEST_CASE("JSON output sorts keys and maps non-finite numbers to null")
{
    io::Json j;
    j["zeta"] = 1;
    j["alpha"] = 0.1;
    j["mid"] = {{"b", std::numeric_limits<double>::infinity()}, {"a", "x\"y"}};
    const std::string s = io::dump_json(j);
    CHECK(s == "{\n  \"alpha\": 0.1,\n  \"mid\": {\n    \"a\": \"x\\\"y\",\n    \"b\": null\n  },\n  \"zeta\": 1\n}\n");
    CHECK(io::Json::parse(s)["alpha"].get<double>() == 0.1);
}

TEST_CASE("CSV cells are quoted only when needed")
{
    io::CsvWriter w({"a", "b"});
    w.row({io::CsvWriter::cell(0.5), io::CsvWriter::cell("x,y")});
    w.row({io::CsvWriter::cell(3), io::CsvWriter::cell("say \"hi\"")});
    CHECK(w.str() == "a,b\n0.5,\"x,y\"\n3,\"say \"\"hi\"\"\"\n");
    CHECK_THROWS(w.row({"1"}));
}

TEST_CASE("SHA-256 known answers")
{
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("artifact set commits with hashes and leaves partial files on failure")
{
    const fs::path ok = scratch("commit");
    {
        io::ArtifactSet a(ok);
        a.write("b.txt", "hello");
        a.write_json("a.json", {{"k", 1}});
        a.write_volatile("timing.json", "{}\n");
        CHECK(fs::exists(ok / "b.txt.partial"));
        CHECK_THROWS(a.write("b.txt", "again"));
        a.commit({{"status", "pass"}});
    }
    CHECK(fs::exists(ok / "b.txt"));
    CHECK_FALSE(fs::exists(ok / "b.txt.partial"));
    const auto m = io::Json::parse(slurp(ok / "manifest.json"));
    REQUIRE(m["files"].size() == 3);
    CHECK(m["files"][0]["name"] == "a.json");
    CHECK(m["files"][1]["sha256"] == io::sha256_hex(slurp(ok / "b.txt")));
    CHECK(m["files"][2]["volatile"] == true);
    CHECK(m["status"] == "pass");

    const fs::path bad = scratch("abandon");
    {
        io::ArtifactSet a(bad);
        a.write("x.csv", "a\n1\n");
        a.abandon({}, "boom");
    }
    CHECK(fs::exists(bad / "x.csv.partial"));
    CHECK_FALSE(fs::exists(bad / "x.csv"));
    CHECK_FALSE(fs::exists(bad / "manifest.json"));
    CHECK(io::Json::parse(slurp(bad / "manifest.json.partial"))["error"] == "boom");
    fs::remove_all(ok);
    fs::remove_all(bad);
}

TEST_CASE("default output directory honours the environment")
{
    ::setenv(io::output_dir_env, "/tmp/psep-env-out", 1);
    CHECK(io::default_output_dir() == fs::path("/tmp/psep-env-out"));
    ::unsetenv(io::output_dir_env);
    CHECK(io::default_output_dir() == fs::path("psep-out"));
}

TEST_CASE("config parsing: values, comments and defaults")
{
    const auto c = io::parse_config("# comment\ngeometry.dim = 2\nlayer.eps_list = 0.1, 0.05,0.02  # trailing\n\n"
                                    "estimate.seed = 99\n",
                                    "t.cfg");
    CHECK(c.dim == 2);
    CHECK(c.domain_radius() == 1.0);
    CHECK(c.forcing_scale() == 40.0);
    CHECK(c.eps_list == std::vector<double>{0.1, 0.05, 0.02});
    CHECK(c.seed == 99u);
    const auto d = io::parse_config("", "empty");
    CHECK(io::parse_config(d.snapshot_text(), "snap").snapshot_text() == d.snapshot_text());
}

TEST_CASE("config errors name the key and the line")
{
    try {
        io::parse_config("layer.alpha = 1.5\n", "a.cfg");
        FAIL("expected ConfigError");
    } catch (const io::ConfigError& e) {
        CHECK(mentions(e, "layer.alpha"));
    }
    try {
        io::parse_config("geometry.dim = 1\nfoo.bar = 2\ngeometry.dim = 2\nlayer.alpha 3\nlayer.zeta = x\n", "b.cfg");
        FAIL("expected ConfigError");
    } catch (const io::ConfigError& e) {
        CHECK(mentions(e, "b.cfg:2: unknown key 'foo.bar'"));
        CHECK(mentions(e, "b.cfg:3: duplicate key 'geometry.dim' (first set on line 1)"));
        CHECK(mentions(e, "b.cfg:4:"));
        CHECK(mentions(e, "b.cfg:5: layer.zeta"));
    }
    CHECK_THROWS_AS(io::parse_config("geometry.dim = 4\n", "c"), io::ConfigError);
    CHECK_THROWS_AS(io::parse_config("layer.eps_list = 0.1,0.3\n", "c"), io::ConfigError);
    CHECK_THROWS_AS(io::parse_config("layer.alpha = 0\n", "c"), io::ConfigError);
    CHECK_THROWS_AS(io::parse_config("estimate.m_max = 2\n", "c"), io::ConfigError);
    CHECK_THROWS_AS(io::load_config("/nonexistent/psep.cfg"), io::ConfigError);
}

TEST_CASE("pipelines: unknown names, byte-identical reruns, partial output on failure")
{
    const io::RunConfig cfg;
    CHECK_THROWS_AS(pipeline::run_pipeline(cfg, "nope", scratch("nope")), pipeline::UsageError);

    const fs::path a = scratch("limit-a"), b = scratch("limit-b");
    const auto ra = pipeline::run_pipeline(cfg, "limit", a);
    pipeline::run_pipeline(cfg, "limit", b);
    CHECK(ra.pass);
    CHECK(slurp(a / "limit.json") == slurp(b / "limit.json"));
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    const auto m = io::Json::parse(slurp(a / "manifest.json"));
    for (const auto& f : m["files"])
        if (f.contains("sha256")) CHECK(f["sha256"] == io::sha256_hex(slurp(a / f["name"].get<std::string>())));
    CHECK(m["inputs_sha256"] == io::sha256_hex(cfg.snapshot_text()));

    io::RunConfig broken;
    broken.dim = 2;
    broken.eps_list = {0.2, 0.1, 0.05};   // the blend collar at eps = 0.2 does not fit
    const fs::path c = scratch("ansatz-broken");
    CHECK_THROWS_AS(pipeline::run_pipeline(broken, "ansatz", c), pipeline::PipelineError);
    CHECK(fs::exists(c / "config.txt.partial"));
    CHECK(fs::exists(c / "manifest.json.partial"));
    CHECK_FALSE(fs::exists(c / "manifest.json"));
    for (const auto& p : {a, b, c}) fs::remove_all(p);
}
