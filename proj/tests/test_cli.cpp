#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support.hpp"

#include "geolab/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run cmd(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    Run r;
    r.code = geolab::cli::run(args, o, e);
    r.out = o.str();
    r.err = e.str();
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::path(GEOLAB_TEST_TMP) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Unset GEODESIC_LAB_CACHE for the scope, restoring it afterwards.
struct EnvGuard {
    std::string saved;
    bool had = false;
    EnvGuard() {
        if (const char* v = std::getenv("GEODESIC_LAB_CACHE")) had = true, saved = v;
        unsetenv("GEODESIC_LAB_CACHE");
    }
    ~EnvGuard() {
        if (had) setenv("GEODESIC_LAB_CACHE", saved.c_str(), 1);
        else unsetenv("GEODESIC_LAB_CACHE");
    }
};

}  // namespace

TEST_CASE("git blob hashes") {
    CHECK(geolab::cli::git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    CHECK(geolab::cli::git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("usage errors") {
    CHECK(cmd({}).code == geolab::cli::usage);
    CHECK(cmd({"frobnicate"}).code == geolab::cli::usage);
    CHECK(cmd({"partition", "--radius", "abc"}).code == geolab::cli::usage);
    const auto d = fresh_dir("usage");
    CHECK(cmd({"partition", "--radius", "2", "--out", d.string()}).code == geolab::cli::usage);
    CHECK(cmd({"charsums", "--mod", "0", "--all-xi", "--out", d.string()}).code == geolab::cli::usage);
    CHECK(cmd({"charsums", "--mod", "4", "--all-xi", "--out", d.string()}).code == geolab::cli::usage);
    CHECK(cmd({"sieve", "--radius", "4", "-X", "4", "-Y", "4", "-Z", "3", "--level", "500", "--out", d.string()}).code ==
          geolab::cli::usage);
    CHECK(cmd({"partition", "--config", (d / "missing.cfg").string()}).code == geolab::cli::usage);
    CHECK(cmd({"--help"}).code == geolab::cli::ok);
}

TEST_CASE("partition output is deterministic") {
    const auto a = fresh_dir("part_a"), b = fresh_dir("part_b");
    REQUIRE(cmd({"partition", "--radius", "4", "--out", a.string()}).code == 0);
    REQUIRE(cmd({"partition", "--radius", "4", "--out", b.string()}).code == 0);
    for (const char* f : {"partition.json", "transitions.csv", "summary.json", "manifest.json"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const json s = json::parse(slurp(a / "summary.json"));
    CHECK(s["parts"] == 80);
    CHECK(s["transitions"] == 2480);
    CHECK(s["irreducible"] == true);
    CHECK(s["aperiodic"] == true);
    CHECK(s["primitivity_index"] == 2);

    const json m = json::parse(slurp(a / "manifest.json"));
    CHECK(m["command"] == "partition");
    CHECK(m["versions"]["schema"] == 1);
    for (const char* f : {"partition.json", "transitions.csv", "summary.json"})
        CHECK(m["output_hashes"][f] == geolab::cli::git_blob_sha1(slurp(a / f)));
}

TEST_CASE("enumerate uses and honours the cache") {
    EnvGuard env;
    const auto d = fresh_dir("enum"), cache = fresh_dir("enum_cache");
    const std::vector<std::string> args{"enumerate", "--radius", "4", "--ball", "8", "--mod", "1+i", "--out", d.string(), "--cache-dir", cache.string()};
    REQUIRE(cmd(args).code == 0);
    const std::string first = slurp(d / "geodesics.csv");
    size_t cached = 0;
    for (const auto& e : fs::directory_iterator(cache)) cached += e.path().filename().string().rfind("enum-", 0) == 0;
    CHECK(cached == 1);
    REQUIRE(cmd(args).code == 0);
    CHECK(slurp(d / "geodesics.csv") == first);
    const json s = json::parse(slurp(d / "summary.json"));
    CHECK(s["classes"] == 204);
    CHECK(fs::exists(d / "equidist.csv"));

    // the environment variable wins over the flag
    const auto env_cache = fresh_dir("enum_env_cache");
    setenv("GEODESIC_LAB_CACHE", env_cache.string().c_str(), 1);
    CHECK(geolab::cli::cache_dir("elsewhere") == env_cache);
    REQUIRE(cmd(args).code == 0);
    CHECK_FALSE(fs::is_empty(env_cache));
    unsetenv("GEODESIC_LAB_CACHE");
    CHECK(geolab::cli::cache_dir("elsewhere") == fs::path("elsewhere"));

    // --no-cache leaves the cache alone
    const auto none = fresh_dir("enum_none");
    auto nc = args;
    nc.back() = none.string();
    nc.push_back("--no-cache");
    REQUIRE(cmd(nc).code == 0);
    CHECK(fs::is_empty(none));
    CHECK(slurp(d / "geodesics.csv") == first);
}

TEST_CASE("config files mirror the flags") {
    const auto d = fresh_dir("cfg"), e = fresh_dir("cfg_flags");
    const fs::path cfg = d / "sieve.cfg";
    std::ofstream(cfg) << "# tiny run\nradius = 4\nX=4\nY=4\nZ=3\nlevel=10\nno-cache=true\nout=" << d.string() << "\n";
    REQUIRE(cmd({"sieve", "--config", cfg.string()}).code == 0);
    REQUIRE(cmd({"sieve", "--radius", "4", "-X", "4", "-Y", "4", "-Z", "3", "--level", "10", "--no-cache", "--out", e.string()}).code == 0);
    CHECK(slurp(d / "ledger.csv") == slurp(e / "ledger.csv"));
    CHECK(slurp(d / "manifest.json") == slurp(e / "manifest.json"));
    const json s = json::parse(slurp(d / "summary.json"));
    CHECK(s["pi_size"] == 285760);

    // the command line wins over the file
    const auto f = fresh_dir("cfg_override");
    REQUIRE(cmd({"sieve", "--config", cfg.string(), "--level", "5", "--out", f.string()}).code == 0);
    const json m = json::parse(slurp(f / "manifest.json"));
    CHECK(m["params"]["Q"] == 5);

    std::ofstream(d / "bad.cfg") << "radius\n";
    CHECK(cmd({"sieve", "--config", (d / "bad.cfg").string()}).code == geolab::cli::usage);
}

TEST_CASE("delta and certification") {
    const auto d = fresh_dir("delta");
    REQUIRE(cmd({"delta", "--radius", "4", "--tol", "1e-2", "--max-depth", "3", "--out", d.string()}).code == 0);
    const json j = json::parse(slurp(d / "delta.json"));
    CHECK(j["lo"].get<double>() <= j["delta"].get<double>());
    CHECK(j["delta"].get<double>() <= j["hi"].get<double>());
    CHECK(j["certified"] == false);
    CHECK(fs::exists(d / "pressure.csv"));
    CHECK(cmd({"delta", "--radius", "4", "--tol", "1e-2", "--max-depth", "3", "--require-certified", "--out", d.string()}).code ==
          geolab::cli::certification);
    CHECK(cmd({"delta", "--radius", "4", "--max-depth", "9", "--out", d.string()}).code == geolab::cli::usage);
}

TEST_CASE("charsums and harvest") {
    const auto d = fresh_dir("cs");
    REQUIRE(cmd({"charsums", "--mod", "2+i", "--all-xi", "--out", d.string()}).code == 0);
    const json s = json::parse(slurp(d / "summary.json"));
    CHECK(s["violations"] == 0);
    const std::string csv = slurp(d / "charsum_margins.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1025);
    REQUIRE(cmd({"charsums", "--mod", "1+i", "--xi", "1,0,0,1", "--out", d.string()}).code == 0);

    const auto h = fresh_dir("hv");
    REQUIRE(cmd({"harvest", "--radius", "4", "--ball", "8", "--delta", "1.8223", "--no-cache", "--out", h.string()}).code == 0);
    const json hs = json::parse(slurp(h / "summary.json"));
    CHECK(hs["classes"] == 204);
    CHECK(fs::exists(h / "harvest.csv"));
}
