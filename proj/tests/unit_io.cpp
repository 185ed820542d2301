// Artifact formats: the binary trajectory frame, CSV layouts, JSON report
// lines, hashing, and output-directory resolution. Golden bytes and strings
// are written out in full so any format drift is caught loudly.

#include <doctest.h>

#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skewsim/ensemble.hpp"
#include "skewsim/io.hpp"
#include "skewsim/verify.hpp"

using namespace skewsim;

namespace {

// two stored slots of a single 2d path: positions (1,2) then (3,4)
PathEnsemble tiny_ensemble() {
    PathEnsemble ens;
    ens.dim = 2;
    ens.n_paths = 1;
    ens.step = 0.5;
    ens.times = {0.0, 0.5};
    ens.stored_steps = {0, 1};
    ens.positions = {1.0, 2.0, 3.0, 4.0};
    return ens;
}

} // namespace

TEST_CASE("binary trajectory frame: exact little-endian layout") {
    std::ostringstream os(std::ios::binary);
    write_trajectory_binary(tiny_ensemble(), os);
    const std::string bytes = os.str();

    // 4 magic + 4 version + 4 dim + 8 n_paths + 8 n_stored + 2*8 times + 4*8 positions
    REQUIRE(bytes.size() == 76);
    CHECK(bytes.compare(0, 4, "SKSM") == 0);

    const auto u8 = [&](std::size_t i) { return std::uint8_t(bytes[i]); };
    // version 1, dim 2, both little-endian u32
    CHECK(u8(4) == 1);
    CHECK(u8(5) == 0);
    CHECK(u8(6) == 0);
    CHECK(u8(7) == 0);
    CHECK(u8(8) == 2);
    // n_paths = 1, n_stored = 2 as u64
    CHECK(u8(12) == 1);
    for (int i = 13; i < 20; ++i) CHECK(u8(std::size_t(i)) == 0);
    CHECK(u8(20) == 2);

    // times[1] = 0.5 encodes as 0x3FE0000000000000, little-endian
    const std::size_t t1 = 28 + 8;
    for (std::size_t i = 0; i < 6; ++i) CHECK(u8(t1 + i) == 0);
    CHECK(u8(t1 + 6) == 0xe0);
    CHECK(u8(t1 + 7) == 0x3f);

    // byte-identity is the contract: a second write matches exactly
    std::ostringstream again(std::ios::binary);
    write_trajectory_binary(tiny_ensemble(), again);
    CHECK(again.str() == bytes);
}

TEST_CASE("trajectory CSV: golden text and downsampling") {
    std::ostringstream os;
    write_trajectory_csv(tiny_ensemble(), os);
    CHECK(os.str() == "path,time,x0,x1\n"
                      "0,0,1,2\n"
                      "0,0.5,3,4\n");

    PathEnsemble line;
    line.dim = 1;
    line.n_paths = 1;
    line.times = {0.0, 0.25, 0.5, 0.75, 1.0};
    line.stored_steps = {0, 1, 2, 3, 4};
    line.positions = {1.0, 1.5, 2.0, 2.5, 3.0};

    std::ostringstream full, thin;
    write_trajectory_csv(line, full);
    CHECK(full.str().substr(0, 12) == "path,time,r\n");

    // every third slot, final slot forced in: times 0, 0.75, 1
    write_trajectory_csv(line, thin, 3);
    CHECK(thin.str() == "path,time,r\n"
                        "0,0,1\n"
                        "0,0.75,2.5\n"
                        "0,1,3\n");
}

TEST_CASE("local-time CSV layout") {
    PathEnsemble ens;
    ens.dim = 1;
    ens.n_paths = 1;
    ens.times = {0.0, 1.0};
    ens.stored_steps = {0, 1};
    ens.positions = {0.5, 0.75};
    ens.tracked_radii = {1.0};
    ens.local_time = {0.0, 0.125};
    ens.crossings = {0};

    std::ostringstream os;
    write_local_time_csv(ens, os);
    CHECK(os.str() == "path,time,level,local_time\n"
                      "0,0,1,0\n"
                      "0,1,1,0.125\n");
}

TEST_CASE("trajectory JSON round-trips through a parser") {
    std::ostringstream os;
    write_trajectory_json(tiny_ensemble(), os);
    const nlohmann::json j = nlohmann::json::parse(os.str());
    CHECK(j["dim"] == 2);
    CHECK(j["n_paths"] == 1);
    REQUIRE(j["times"].size() == 2);
    CHECK(j["times"][1] == 0.5);
    REQUIRE(j["positions"].size() == 1);
    REQUIRE(j["positions"][0].size() == 2);
    CHECK(j["positions"][0][1][0] == 3.0);
    CHECK(j["positions"][0][1][1] == 4.0);
}

TEST_CASE("report JSON lines and the printed table") {
    TestReport r;
    r.name = "crossing";
    r.estimate = 0.709;
    r.target = 22.0 / 31.0;
    r.stderr_ = 0.0014;
    r.p_value = -1.0;
    r.n = 100000;
    r.pass = true;
    r.config_echo = "{\"membrane\":0.5}";

    const nlohmann::json j = nlohmann::json::parse(to_json_line(r));
    CHECK(j["name"] == "crossing");
    CHECK(j["pass"] == true);
    CHECK(j["config"]["membrane"] == 0.5);
    CHECK(!j.contains("p_value")); // negative sentinel means not a p-test
    CHECK(!j.contains("note"));

    TestReport k;
    k.name = "radial_consistency";
    k.p_value = 0.42;
    k.pass = false;
    k.note = "negative control";
    const nlohmann::json jk = nlohmann::json::parse(to_json_line(k));
    CHECK(jk["p_value"] == 0.42);
    CHECK(jk["note"] == "negative control");

    std::ostringstream table;
    write_report_table({r, k}, table);
    const std::string text = table.str();
    CHECK(text.find("crossing") != std::string::npos);
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(text.find("FAIL") != std::string::npos);
    CHECK(text.find("0.42") != std::string::npos);
}

TEST_CASE("run manifest JSON") {
    RunManifest m;
    m.subcommand = "simulate";
    m.seed = 42;
    m.config_hash = "00deadbeef00cafe";
    m.outputs = {"trajectories.sksm", "manifest.json"};
    m.wall_seconds = 1.5;

    const nlohmann::json j = nlohmann::json::parse(to_json(m));
    CHECK(j["subcommand"] == "simulate");
    CHECK(j["seed"] == 42);
    CHECK(j["config_hash"] == "00deadbeef00cafe");
    REQUIRE(j["outputs"].size() == 2);
    CHECK(j["outputs"][0] == "trajectories.sksm");
    CHECK(j["version"] == "skewsim 1.0");
}

TEST_CASE("fnv1a64 reference vectors") {
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("a") == 12638187200555641996ULL);
    CHECK(fnv1a64("hello") == 11831194018420276491ULL);
}

TEST_CASE("output directory precedence: flag, environment, cwd") {
    CHECK(resolve_out_dir("given/dir") == "given/dir");

    ::setenv("SKEWSIM_OUT_DIR", "/tmp/skewsim-env-test", 1);
    CHECK(resolve_out_dir("") == "/tmp/skewsim-env-test");
    CHECK(resolve_out_dir("flag-wins") == "flag-wins");

    ::unsetenv("SKEWSIM_OUT_DIR");
    CHECK(resolve_out_dir("") == ".");
}
