#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "egm/field_io.hpp"
#include "egm/scenario.hpp"
#include "test_support.hpp"

using namespace egm;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("egm_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_file(const fs::path& dir, const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << body;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* ZERO_SCENARIO = R"json({
  "name": "zero",
  "grid": {"nt": 5, "nx": 5, "ny": 5, "nz": 5, "dtau": 0.1, "h": 0.1},
  "audits": ["maxwell", "charge", "energy", "inertia", "second_law", "first_law"]
})json";

const char* CHARGE_FAIL_SCENARIO = R"json({
  "name": "charge_drift",
  "grid": {"nt": 5, "nx": 5, "ny": 5, "nz": 5, "dtau": 0.1, "h": 0.1},
  "theta": {"rho": "tau"},
  "audits": ["charge"],
  "tolerances": {"charge": 1e-3}
})json";

int run_cli(const std::string& args) {
    const char* cli = std::getenv("EGM_CLI");
    REQUIRE(cli != nullptr);
    const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("field CSV round trip") {
    const Grid4 g(3, 4, 2, 5, 0.25, 0.5, -0.5, 1.0, 0.0, -2.0);
    std::mt19937_64 rng(3);
    BiquatField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = egmtest::random_biquat(rng);

    const fs::path dir = temp_dir("csv");
    const std::string path = (dir / "field.csv").string();
    dump_field_csv(path, f);
    const BiquatField g2 = load_field_csv(path);
    REQUIRE(g2.grid().same_layout(g));
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, norm(g2[i] - f[i]));
    CHECK(worst == 0.0);  // %.17g is round-trip exact

    CHECK_THROWS_AS(load_field_csv((dir / "missing.csv").string()), ConfigError);
    write_file(dir, "bad.csv", "tau,x\n1,2\n");
    CHECK_THROWS_AS(load_field_csv((dir / "bad.csv").string()), ConfigError);
}

TEST_CASE("zero scenario passes every audit with zero residuals") {
    const fs::path dir = temp_dir("zero");
    const std::string scen = write_file(dir, "zero.json", ZERO_SCENARIO);
    const ScenarioOutcome out = run_scenario(scen, {}, (dir / "out").string());
    CHECK(out.exit_code == 0);
    const json rep = json::parse(slurp(out.report_path));
    CHECK(rep.at("payload").at("all_pass").get<bool>());
    for (const auto& audit : rep.at("payload").at("audits"))
        CHECK(audit.at("residual_max").get<double>() == 0.0);
}

TEST_CASE("built-to-fail charge scenario exits 2; an override rescues it") {
    const fs::path dir = temp_dir("fail");
    const std::string scen = write_file(dir, "charge.json", CHARGE_FAIL_SCENARIO);
    const ScenarioOutcome out = run_scenario(scen, {}, (dir / "out").string());
    CHECK(out.exit_code == 2);
    const json rep = json::parse(slurp(out.report_path));
    const auto& audit = rep.at("payload").at("audits").at(0);
    CHECK(audit.at("residual_max").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(audit.at("pass").get<bool>());

    const ScenarioOutcome rescued =
        run_scenario(scen, {"tolerances.charge=2.0"}, (dir / "out2").string());
    CHECK(rescued.exit_code == 0);
}

TEST_CASE("configuration errors leave no artifacts") {
    const fs::path dir = temp_dir("conf");
    const std::string scen = write_file(dir, "bad.json", R"({"name": "nogrid"})");
    CHECK_THROWS_AS(run_scenario(scen, {}, (dir / "out").string()), ConfigError);
    CHECK_FALSE(fs::exists(dir / "out" / "report.json"));

    const std::string badaudit = write_file(
        dir, "badaudit.json",
        R"({"grid": {"nt":3,"nx":3,"ny":3,"nz":3,"dtau":0.1,"h":0.1}, "audits":["nope"]})");
    CHECK_THROWS_AS(run_scenario(badaudit, {}, (dir / "out3").string()), ConfigError);

    // parse errors carry the file name
    const std::string malformed = write_file(dir, "malformed.json", "{oops");
    CHECK_THROWS_AS(run_scenario(malformed, {}, (dir / "out4").string()), ConfigError);
}

TEST_CASE("determinism: identical scenario and seed give identical payloads") {
    const char* scen_dir = std::getenv("EGM_SCENARIOS");
    REQUIRE(scen_dir != nullptr);
    const std::string scen = std::string(scen_dir) + "/interaction_pair.json";
    const fs::path dir = temp_dir("det");
    const ScenarioOutcome a = run_scenario(scen, {}, (dir / "a").string());
    const ScenarioOutcome b = run_scenario(scen, {}, (dir / "b").string());
    CHECK(a.exit_code == b.exit_code);
    const json ra = json::parse(slurp(a.report_path));
    const json rb = json::parse(slurp(b.report_path));
    CHECK(ra.at("payload").dump() == rb.at("payload").dump());

    // dynamics log lines are byte-identical too
    const std::string da = slurp((dir / "a" / "dynamics.jsonl").string());
    const std::string db = slurp((dir / "b" / "dynamics.jsonl").string());
    CHECK(da == db);
    CHECK(!da.empty());
}

TEST_CASE("covariance audit with refinement reports a 2nd-order ratio") {
    const fs::path dir = temp_dir("cov");
    const char* scen = R"json({
      "name": "cov_small",
      "grid": {"nt": 29, "nx": 18, "ny": 5, "nz": 5, "dtau": 0.1, "h": 0.2,
               "tau0": -0.9, "x0": -2.0, "y0": -0.4, "z0": -0.4},
      "strength": {"A2": "cos(tau + x)", "A3": "-i*cos(tau + x)"},
      "transform": {"v": 0.6, "e": [1, 0, 0], "interp_order": 2, "refine": true,
                    "target": {"nt": 10, "nx": 10, "ny": 5, "nz": 5,
                               "dtau": 0.1, "h": 0.2,
                               "tau0": 0.0, "x0": -0.9, "y0": -0.4, "z0": -0.4}},
      "audits": ["covariance"],
      "tolerances": {"covariance": 0.1}
    })json";
    const std::string path = write_file(dir, "cov.json", scen);
    const ScenarioOutcome out = run_scenario(path, {}, (dir / "out").string());
    CHECK(out.exit_code == 0);
    const json rep = json::parse(slurp(out.report_path));
    const auto& detail = rep.at("payload").at("audits").at(0).at("detail");
    CHECK(detail.at("covered_fraction").get<double>() > 0.999);
    // tiny masked regions make the max-norm ratio noisy; the full-scale
    // window check lives in the acceptance suite
    const double ratio = detail.at("refinement_ratio").get<double>();
    CHECK(ratio > 2.5);
    CHECK(detail.at("refined_residual_max").get<double>() <
          rep.at("payload").at("audits").at(0).at("residual_max").get<double>());
}

TEST_CASE("free wave audit scenario passes") {
    const char* scen_dir = std::getenv("EGM_SCENARIOS");
    REQUIRE(scen_dir != nullptr);
    const fs::path dir = temp_dir("wave");
    const ScenarioOutcome out = run_scenario(std::string(scen_dir) + "/free_wave_audit.json", {},
                                             (dir / "out").string());
    CHECK(out.exit_code == 0);
}

TEST_CASE("gauge audit and missing csv reference") {
    const fs::path dir = temp_dir("gauge");
    const char* scen = R"json({
      "name": "gauge",
      "grid": {"nt": 5, "nx": 6, "ny": 6, "nz": 6, "dtau": 0.1, "h": 0.1},
      "potential": {"phi": "sin(x)", "Psi1": "-y", "Psi2": "x", "Psi3": "0.5"},
      "audits": ["gauge"],
      "tolerances": {"gauge": 1e-9}
    })json";
    const std::string path = write_file(dir, "gauge.json", scen);
    const ScenarioOutcome out = run_scenario(path, {}, (dir / "out").string());
    CHECK(out.exit_code == 0);

    const char* missing = R"json({
      "name": "missingcsv",
      "grid": {"nt": 4, "nx": 4, "ny": 4, "nz": 4, "dtau": 0.1, "h": 0.1},
      "theta": {"csv": "does_not_exist.csv"},
      "audits": ["charge"]
    })json";
    const std::string mpath = write_file(dir, "missing.json", missing);
    CHECK_THROWS_AS(run_scenario(mpath, {}, (dir / "out2").string()), ConfigError);
}

TEST_CASE("picard consistency audit runs end to end") {
    const fs::path dir = temp_dir("picard");
    const char* scen = R"json({
      "name": "picard_weak",
      "kappa": 1.0,
      "grid": {"nt": 4, "nx": 5, "ny": 5, "nz": 5, "dtau": 0.1, "h": 0.15,
               "tau0": 0.0, "x0": -0.3, "y0": -0.3, "z0": -0.3},
      "solver": {"sphere_degree": 4, "radial_shells": 4, "tol": 1e-8, "max_iter": 15},
      "picard": {
        "theta0": {"rho": "exp(-6*(x*x+y*y+z*z))"},
        "external": {"A1": "0.05*cos(tau)"}
      },
      "audits": ["picard_consistency"],
      "tolerances": {"picard_consistency": 1.0}
    })json";
    const std::string path = write_file(dir, "picard.json", scen);
    const ScenarioOutcome out = run_scenario(path, {}, (dir / "out").string());
    CHECK(out.exit_code == 0);
    const json rep = json::parse(slurp(out.report_path));
    const auto& audit = rep.at("payload").at("audits").at(0);
    CHECK(audit.at("detail").at("converged").get<bool>());
    CHECK(audit.at("detail").at("first_law_max").get<double>() <
          5.0 * audit.at("residual_max").get<double>() + 1e-12);
}

TEST_CASE("cli: run, audit and transform subcommands") {
    const fs::path dir = temp_dir("cli");
    const std::string scen = write_file(dir, "zero.json", ZERO_SCENARIO);
    CHECK(run_cli("run " + scen + " --out " + (dir / "o1").string()) == 0);

    const std::string fail = write_file(dir, "fail.json", CHARGE_FAIL_SCENARIO);
    CHECK(run_cli("run " + fail + " --out " + (dir / "o2").string()) == 2);
    CHECK(run_cli("run " + fail + " --out " + (dir / "o2b").string() +
                  " --override tolerances.charge=2.0") == 0);

    const std::string nogrid = write_file(dir, "nogrid.json", R"({"name":"x"})");
    CHECK(run_cli("run " + nogrid + " --out " + (dir / "o3").string()) == 1);
    CHECK(run_cli("run " + (dir / "missing.json").string()) == 1);

    // audit a drifting charge dump: rho = tau so the residual is 1
    const Grid4 g(5, 5, 5, 5, 0.1, 0.1);
    const BiquatField drift = BiquatField::sample(g, [](double tau, const Vec3&) {
        return Biquaternion{Complex(0, -tau), {}};  // ChargeCurrent node for rho = tau
    });
    const std::string csv = (dir / "theta.csv").string();
    dump_field_csv(csv, drift);
    CHECK(run_cli("audit " + csv + " --law charge --tol 1e-3") == 2);
    CHECK(run_cli("audit " + csv + " --law charge --tol 1.5") == 0);
    CHECK(run_cli("audit " + csv + " --law bogus") == 1);

    // audit laws that take a second operand
    const BiquatField zero_strength(g);
    const std::string acsv = (dir / "strength.csv").string();
    dump_field_csv(acsv, zero_strength);
    CHECK(run_cli("audit " + acsv + " --law maxwell --theta " + csv + " --tol 10") == 0);
    CHECK(run_cli("audit " + acsv + " --law energy --tol 1e-6") == 0);
    CHECK(run_cli("audit " + acsv + " --law wave --theta " + csv + " --tol 10") == 0);
    CHECK(run_cli("audit " + csv + " --law inertia --tol 10") == 0);

    // transform a dump and reload the output
    const std::string out_csv = (dir / "boosted.csv").string();
    CHECK(run_cli("transform " + csv + " --v 0.3 --e 1,0,0 --out " + out_csv) == 0);
    const BiquatField boosted = load_field_csv(out_csv);
    CHECK(boosted.grid().same_layout(g));
}
