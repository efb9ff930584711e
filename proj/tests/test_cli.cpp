#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>

#include "conetool/runner.hpp"

using namespace conetool;
namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* b = std::getenv("CONETOOL_BIN");
    REQUIRE(b != nullptr);
    return b;
}

std::string golden_dir() {
    const char* g = std::getenv("CONETOOL_GOLDEN");
    REQUIRE(g != nullptr);
    return g;
}

int run(const std::string& cmd) {
    int ret = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(ret);
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

nlohmann::json experiment_config() {
    return nlohmann::json::parse(R"({
      "model": {
        "cross_section": {"kind": "circle", "a": 1.0},
        "l_max": 2,
        "mesh": {"grading": "geometric", "N": 120, "x0": 1e-6},
        "outer_bc": {"type": "neumann"}
      },
      "problem": "pme",
      "solver": {"time_stepper": "backward_euler", "dt": 1e-3, "t_end": 0.02, "m": 2.0},
      "initial": [
        {"kind": "constant", "value": 1.0},
        {"kind": "eigenvector", "mode": 0, "index": 2, "scale": 0.2}
      ],
      "tasks": ["spectrum", "roots", "windows", "solve", "fit", "decompose", "probe"],
      "roots": {"gamma": -0.5, "k": 2},
      "windows": {"p": 12.0, "q": 12.0, "gamma": -0.5, "s0": 0.0},
      "fit": {"time": 0.02, "mode": 0, "window": [1e-4, 1e-2], "subtract_constant": true},
      "decompose": {"tau": 0.005, "nu": 0.015, "q": 2.0, "gamma": -0.5, "p": 2.0, "k_max": 2},
      "probe": {"time": 0.005, "theta": 2.356194490192345, "c": 1.0, "samples": 6, "gamma": -0.5},
      "seed": 7
    })");
}

}  // namespace

TEST_CASE("roots subcommand reproduces the oracle golden file") {
    fs::path d = fresh_dir("conetool_cli_roots");
    REQUIRE(run(bin() + " spectrum --circle 1 --lmax 12 --out " + (d / "spec.json").string()) == 0);
    REQUIRE(run(bin() + " roots --spectrum " + (d / "spec.json").string() +
                " --gamma 0.3 --k 2 --out " + (d / "q.json").string()) == 0);
    REQUIRE(run(bin() + " compare --report " + (d / "q.json").string() + " --golden " +
                golden_dir() + "/q_set_circle_g03_k2.json") == 0);
}

TEST_CASE("compare subcommand verdicts") {
    fs::path d = fresh_dir("conetool_cli_compare");
    nlohmann::json a = {{"alpha", 2.0}, {"eta", 1}};
    write_text(d / "a.json", a.dump());
    SECTION("identical files: empty diff, exit 0") {
        REQUIRE(run(bin() + " compare --report " + (d / "a.json").string() + " --golden " +
                    (d / "a.json").string()) == 0);
    }
    SECTION("value off by 0.5 with tight tolerance: exit 1 naming the field") {
        nlohmann::json b = a;
        b["alpha"] = 2.5;
        write_text(d / "b.json", b.dump());
        REQUIRE(run(bin() + " compare --report " + (d / "a.json").string() + " --golden " +
                    (d / "b.json").string() + " --tol-abs 0.02 --tol-rel 1e-9") == 1);
        CompareResult res = compare_reports(a, b, 0.02, 1e-9);
        REQUIRE(res.diffs.size() == 1);
        CHECK(res.diffs[0].find("alpha") != std::string::npos);
    }
    SECTION("missing field: schema mismatch, exit 2") {
        nlohmann::json b = {{"alpha", 2.0}};
        write_text(d / "b.json", b.dump());
        REQUIRE(run(bin() + " compare --report " + (d / "a.json").string() + " --golden " +
                    (d / "b.json").string()) == 2);
    }
}

TEST_CASE("malformed config exits with code 2") {
    fs::path d = fresh_dir("conetool_cli_bad");
    write_text(d / "bad_model.json", R"({"cross_section": {"kind": "circle", "a": "one"}})");
    write_text(d / "cfg.json", R"({"dt": 1e-3, "t_end": 1e-2, "initial": {"kind": "constant", "value": 1}})");
    CHECK(run(bin() + " solve heat --model " + (d / "bad_model.json").string() + " --config " +
              (d / "cfg.json").string() + " --out " + (d / "traj").string()) == 2);
    // missing file
    CHECK(run(bin() + " roots --spectrum " + (d / "nope.json").string() +
              " --gamma 0.3 --k 2") != 0);
}

TEST_CASE("solve -> fit -> decompose -> probe round trip through files") {
    fs::path d = fresh_dir("conetool_cli_roundtrip");
    write_text(d / "model.json", R"({
      "cross_section": {"kind": "circle", "a": 1.0},
      "l_max": 2,
      "mesh": {"grading": "geometric", "N": 150, "x0": 1e-6},
      "outer_bc": {"type": "neumann"}
    })");
    write_text(d / "solve.json", R"({
      "time_stepper": "backward_euler", "dt": 1e-3, "t_end": 0.02, "m": 2.0,
      "initial": [
        {"kind": "constant", "value": 1.0},
        {"kind": "eigenvector", "mode": 0, "index": 2, "scale": 0.2}
      ]
    })");
    REQUIRE(run(bin() + " solve pme --model " + (d / "model.json").string() + " --config " +
                (d / "solve.json").string() + " --out " + (d / "traj").string()) == 0);
    REQUIRE(fs::exists(d / "traj" / "manifest.json"));

    // trajectory round trip preserves slices
    Trajectory traj = read_trajectory(d / "traj");
    REQUIRE(traj.slices.size() == 21);
    CHECK(traj.problem == "pme");

    REQUIRE(run(bin() + " fit --traj " + (d / "traj").string() +
                " --time 0.02 --mode 0 --subtract-constant --out " + (d / "fit.json").string()) ==
            0);
    REQUIRE(run(bin() + " decompose --traj " + (d / "traj").string() +
                " --tau 0.005 --nu 0.015 --q 2 --gamma -0.5 --out " + (d / "dec.json").string()) ==
            0);
    REQUIRE(run(bin() + " probe --matrix-from " + (d / "traj").string() +
                "@0.005 --theta 2.356 --c 1 --gamma -0.5 --out " + (d / "probe.json").string()) ==
            0);

    auto dec = nlohmann::json::parse(read_text(d / "dec.json"));
    CHECK(dec.at("w_at_tau").get<double>() == 0.0);
    CHECK(dec.at("deviations").contains("outer_bc"));
    auto probe = nlohmann::json::parse(read_text(d / "probe.json"));
    CHECK(probe.at("K_est").get<double>() > 0.0);
    CHECK(probe.at("note").get<std::string>().find("R-") != std::string::npos);
}

TEST_CASE("field csv round trip") {
    auto model = ConeModel::make(CrossSection::circle(1.0), RadialMesh::geometric(64, 1e-4),
                                 OuterBC::neumann(), 2);
    ConeField f;
    f.mesh = model.mesh;
    f.cross = model.cross;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> gauss;
    for (int m : {-1, 0, 1}) {
        Eigen::VectorXcd v(model.mesh->size());
        for (int i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
        f.modes.push_back({m, v});
    }
    fs::path d = fresh_dir("conetool_cli_csv");
    write_field_csv(d / "f.csv", f);
    ConeField g = read_field_csv(d / "f.csv", model);
    for (int m : {-1, 0, 1})
        CHECK((g.mode(m) - f.mode(m)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("report runs are deterministic byte for byte") {
    nlohmann::json cfg = experiment_config();
    fs::path d1 = fresh_dir("conetool_report_1");
    fs::path d2 = fresh_dir("conetool_report_2");
    REQUIRE(run_experiment(cfg, d1).exit_code == 0);
    REQUIRE(run_experiment(cfg, d2).exit_code == 0);
    int compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(d1)) {
        if (!entry.is_regular_file()) continue;
        fs::path rel = fs::relative(entry.path(), d1);
        REQUIRE(fs::exists(d2 / rel));
        CHECK(read_text(entry.path()) == read_text(d2 / rel));
        ++compared;
    }
    CHECK(compared >= 8);  // spectrum, q_set, windows, traj files, fit, decompose, probe, summary
}

TEST_CASE("report pipeline emits the deviation ledger everywhere") {
    nlohmann::json cfg = experiment_config();
    fs::path d = fresh_dir("conetool_report_ledger");
    REQUIRE(run_experiment(cfg, d).exit_code == 0);
    for (const char* name : {"decompose.json", "probe.json", "fit.json", "summary.json"}) {
        auto j = nlohmann::json::parse(read_text(d / name));
        INFO(name);
        REQUIRE(j.contains("deviations"));
        CHECK(j.at("deviations").contains("outer_bc"));
        CHECK(j.at("deviations").contains("omega"));
    }
}
