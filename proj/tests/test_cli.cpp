#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "config_io.hpp"
#include "ivpb/time_stepper.hpp"
#include "series.hpp"
#include "snapshot.hpp"
#include "support.hpp"

using namespace ivpb;
using namespace ivpb::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ivpb_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

std::string config_error(const json& j) {
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(IVPB_BIN) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// a tiny run: 16 x 8^3, ten steps
const char* kSmall = R"({
  // comments are accepted
  "grid": {"nx": [16], "nv": 8},
  "time": {"dt": 0.005, "t_end": 0.05},
  "initial_data": {"a": {"amp": 0.01}, "micro": {"amp": 0.002}},
  "output": {"every": 2, "k_max": 1}
})";

}  // namespace

TEST_CASE("empty config gives the defaults") {
    const RunConfig c = config_from_json(json::object());
    CHECK(c.nx == std::vector<int>{32});
    CHECK(c.nv == 16);
    CHECK(c.v_max == 6.0);
    CHECK(!c.dt);
    CHECK(c.mode == Mode::Perturbation);
    CHECK(c.collision.sphere_nodes == 26);
    CHECK(c.k_max == 2);
    CHECK(c.resolved_dt() == doctest::Approx(0.5 / 32 / 6.0));
}

TEST_CASE("config errors name the offending key") {
    CHECK(config_error({{"grid", {{"nxx", 4}}}}) == "unknown key 'grid.nxx'");
    CHECK(config_error({{"gird", json::object()}}) == "unknown key 'gird'");
    CHECK(config_error({{"time", {{"dt", 0.0}}}}) == "time.dt must be positive or 'auto'");
    CHECK(config_error({{"time", {{"dt", -1e-3}}}}) == "time.dt must be positive or 'auto'");
    CHECK(config_error({{"time", {{"dt", "fast"}}}}) == "time.dt must be positive or 'auto'");
    CHECK(config_error({{"grid", {{"nv", "sixteen"}}}}) == "grid.nv has the wrong type");
    CHECK(config_error({{"time", {{"mode", "HYBRID"}}}}).find("time.mode") == 0);
    CHECK(config_error({{"grid", {{"v_max", -2.0}}}}) == "grid.v_max must be positive");
}

TEST_CASE("physical mode rejects data that would make F negative") {
    const json j = {{"time", {{"mode", "PHYSICAL"}}}, {"initial_data", {{"a", {{"amp", 0.5}}}, {"c", {{"amp", 0.1}}}}}};
    CHECK(config_error(j).find("PHYSICAL mode requires") != std::string::npos);
    const json ok = {{"time", {{"mode", "PHYSICAL"}}}, {"initial_data", {{"a", {{"amp", 0.01}}}}}};
    CHECK(config_error(ok).empty());
}

TEST_CASE("config echo round trip") {
    const fs::path dir = scratch("echo");
    spit(dir / "small.json", kSmall);
    const RunConfig c = parse_config((dir / "small.json").string());
    CHECK(c.nx == std::vector<int>{16});
    CHECK(c.init.a.amp == 0.01);
    const json echo = config_to_json(c);
    CHECK(echo["time"]["dt"].get<double>() == 0.005);
    const RunConfig back = config_from_json(echo);
    CHECK(config_to_json(back) == echo);
    CHECK(back.resolved_dt() == c.resolved_dt());
    CHECK(back.k_max == 1);
    CHECK_THROWS_AS(parse_config((dir / "missing.json").string()), ConfigError);
    spit(dir / "broken.json", "{\"grid\": ");
    CHECK_THROWS_AS(parse_config((dir / "broken.json").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("snapshot round trip is bitwise") {
    const fs::path dir = scratch("snap");
    spit(dir / "small.json", kSmall);
    const RunConfig cfg = parse_config((dir / "small.json").string());
    const Model m(cfg, test::tables_for(cfg));
    const SimState s = step(m, build_initial_data(m, cfg.init), cfg.resolved_dt());
    write_snapshot(make_snapshot(cfg, s), (dir / "a.ivpb").string());
    const Snapshot r = read_snapshot((dir / "a.ivpb").string());
    CHECK(r.values == s.field.values);
    CHECK(r.phi == s.potential.phi);
    CHECK(r.time == s.time);
    CHECK(r.step_index == 1);
    CHECK(r.nx == cfg.nx);
    CHECK(r.nv == 8);
    write_snapshot(r, (dir / "b.ivpb").string());
    CHECK(slurp(dir / "a.ivpb") == slurp(dir / "b.ivpb"));
    const std::string bytes = slurp(dir / "a.ivpb");
    CHECK(bytes.substr(0, 8) == "IVPBSNAP");
    // header 8 + 4 + 1 + 4 + 4 + 8 + 4 + 8 + 8, values, has_phi, phi
    CHECK(bytes.size() == 49 + 8 * s.field.values.size() + 1 + 8 * 16);

    const SimState back = restore_state(m, r);
    CHECK(back.field.values == s.field.values);
    CHECK((back.potential.phi - s.potential.phi).cwiseAbs().maxCoeff() < 1e-14);

    RunConfig other = cfg;
    other.nx = {8};
    const Model m2(other, test::tables_for(other));
    CHECK_THROWS_AS(restore_state(m2, r), SnapshotError);
    fs::remove_all(dir);
}

TEST_CASE("snapshot version, magic and truncation errors") {
    const fs::path dir = scratch("snapbad");
    Snapshot s;
    s.nx = {4};
    s.v_max = 5.0;
    s.nv = 2;
    s.values = Eigen::MatrixXd::Ones(8, 4);
    write_snapshot(s, (dir / "ok.ivpb").string());
    std::string bytes = slurp(dir / "ok.ivpb");

    std::string v2 = bytes;
    v2[8] = 2;
    spit(dir / "v2.ivpb", v2);
    try {
        read_snapshot((dir / "v2.ivpb").string());
        FAIL("expected a version error");
    } catch (const SnapshotError& e) {
        CHECK(std::string(e.what()) == "unsupported snapshot version 2 (expected 1)");
    }

    std::string junk = bytes;
    junk[0] = 'X';
    spit(dir / "junk.ivpb", junk);
    CHECK_THROWS_WITH_AS(read_snapshot((dir / "junk.ivpb").string()), doctest::Contains("not an IVPBSNAP file"),
                         SnapshotError);

    spit(dir / "short.ivpb", bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_WITH_AS(read_snapshot((dir / "short.ivpb").string()), doctest::Contains("truncated"), SnapshotError);
    fs::remove_all(dir);
}

TEST_CASE("series header and row format") {
    std::ostringstream os;
    write_series_header(os);
    CHECK(os.str() ==
          "# ivpb-series v1\nt,triple_norm_sq,triple_norm_nu_sq,e_functional,y_lyapunov,mass_res,momentum_res_1,"
          "momentum_res_2,momentum_res_3,energy_res,neutrality_res,min_F,newton_iters\n");
    EnergyReport r;
    r.t = 0.1;
    r.newton_iters = 3;
    std::ostringstream row;
    write_series_row(row, r);
    CHECK(row.str() == "0.10000000000000001,0,0,0,0,0,0,0,0,0,0,0,3\n");
}

TEST_CASE("run command: outputs, t_end = 0 and resume") {
    const fs::path dir = scratch("run");
    spit(dir / "small.json", kSmall);
    REQUIRE(run_binary("run --config " + (dir / "small.json").string() + " --out " + (dir / "a").string()) == 0);
    for (const char* f : {"config.json", "series.csv", "final.ivpb", "status.json", "snap_00000000.ivpb",
                          "snap_00000010.ivpb"})
        CHECK(fs::exists(dir / "a" / f));
    const json status = json::parse(slurp(dir / "a" / "status.json"));
    CHECK(status["status"] == "completed");
    CHECK(status["steps"] == 10);
    std::istringstream csv(slurp(dir / "a" / "series.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 2 + 6);  // version line, header, t = 0 and every second step

    // the echoed config reproduces the run
    REQUIRE(run_binary("run --config " + (dir / "a" / "config.json").string() + " --out " + (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "series.csv") == slurp(dir / "b" / "series.csv"));

    // resuming from the step-4 snapshot lands on the same final state
    REQUIRE(run_binary("run --config " + (dir / "small.json").string() + " --out " + (dir / "c").string() +
                       " --resume " + (dir / "a" / "snap_00000004.ivpb").string()) == 0);
    const Snapshot fa = read_snapshot((dir / "a" / "final.ivpb").string());
    const Snapshot fc = read_snapshot((dir / "c" / "final.ivpb").string());
    CHECK(fc.step_index == 10);
    CHECK((fa.values - fc.values).cwiseAbs().maxCoeff() <= 1e-14 * fa.values.cwiseAbs().maxCoeff());

    json zero = json::parse(slurp(dir / "a" / "config.json"));
    zero["time"]["t_end"] = 0.0;
    spit(dir / "zero.json", zero.dump());
    REQUIRE(run_binary("run --config " + (dir / "zero.json").string() + " --out " + (dir / "z").string()) == 0);
    std::istringstream z(slurp(dir / "z" / "series.csv"));
    rows = 0;
    while (std::getline(z, line)) ++rows;
    CHECK(rows == 3);
    fs::remove_all(dir);
}

TEST_CASE("series is identical across thread counts") {
    const fs::path dir = scratch("threads");
    spit(dir / "small.json", kSmall);
    REQUIRE(run_binary("--threads 1 run --config " + (dir / "small.json").string() + " --out " + (dir / "t1").string()) == 0);
    REQUIRE(run_binary("--threads 3 run --config " + (dir / "small.json").string() + " --out " + (dir / "t3").string()) == 0);
    CHECK(slurp(dir / "t1" / "series.csv") == slurp(dir / "t3" / "series.csv"));
    CHECK(slurp(dir / "t1" / "final.ivpb") == slurp(dir / "t3" / "final.ivpb"));
    fs::remove_all(dir);
}

TEST_CASE("check, poisson and spectrum commands") {
    const fs::path dir = scratch("cmds");
    const json small = {{"grid", {{"nx", {16}}, {"nv", 8}}}, {"initial_data", {{"a", {{"amp", 0.01}}}}}};
    spit(dir / "small.json", small.dump());
    CHECK(run_binary("run --config " + (dir / "missing.json").string() + " --out " + (dir / "x").string()) == 2);
    CHECK(run_binary("bogus") != 0);

    std::string ones;
    for (int i = 0; i < 16; ++i) ones += "1.0\n";
    spit(dir / "rho.txt", ones);
    REQUIRE(run_binary("poisson --config " + (dir / "small.json").string() + " --density " + (dir / "rho.txt").string() +
                       " --out " + (dir / "p").string()) == 0);
    const json rep = json::parse(slurp(dir / "p" / "poisson_report.json"));
    CHECK(rep["residual_norm"].get<double>() == 0.0);
    CHECK(rep["neutrality"].get<double>() == 0.0);
    std::istringstream phi(slurp(dir / "p" / "phi.txt"));
    double x, sup = 0.0;
    int n = 0;
    while (phi >> x) {
        sup = std::max(sup, std::abs(x));
        ++n;
    }
    CHECK(n == 16);
    CHECK(sup == 0.0);
    spit(dir / "rho_short.txt", "1.0 1.0\n");
    CHECK(run_binary("poisson --config " + (dir / "small.json").string() + " --density " +
                     (dir / "rho_short.txt").string() + " --out " + (dir / "p2").string()) == 2);

    REQUIRE(run_binary("spectrum --config " + (dir / "small.json").string() + " --trials 4 --out " +
                       (dir / "s").string()) == 0);
    const json sp = json::parse(slurp(dir / "s" / "spectrum.json"));
    CHECK(sp["delta_hat"].get<double>() > 0.0);
    CHECK(sp["n"] == 8);

    const int rc = run_binary("check --config " + (dir / "small.json").string() + " --out " + (dir / "c").string());
    CHECK((rc == 0 || rc == 1));
    const json ck = json::parse(slurp(dir / "c" / "check.json"));
    CHECK(ck.size() > 10u);
    fs::remove_all(dir);
}
