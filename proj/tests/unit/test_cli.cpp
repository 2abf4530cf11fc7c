#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pvarlevy/cli.hpp"

namespace fs = std::filesystem;
using pvarlevy::cli::run;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    fs::path d = fs::temp_directory_path() / "pvarlevy_cli_test";
    fs::create_directories(d);
    return d;
}

std::string write(const std::string& name, const std::string& text) {
    fs::path f = scratch() / name;
    std::ofstream(f) << text;
    return f.string();
}

std::string slurp(const std::string& f) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kModel = R"({"schema": 1, "dimension": 1, "alpha": [0.1],
  "atoms": [{"point": [0.3], "rate": 3}, {"point": [-0.5], "rate": 1}], "K_basis": [[1]], "L_basis": []})";

}  // namespace

TEST_CASE("saw command") {
    auto r = call({"saw", "--n", "3", "--T", "1", "--v", "1,0", "--p", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("pvar^p = 6\n") != std::string::npos);
    auto j = call({"--json", "saw", "--n", "2", "--v", "0.5", "--p", "1.5"});
    CHECK(nlohmann::json::parse(j.out)["pvar^p"].get<double>() == doctest::Approx(4.0 * std::pow(0.5, 1.5)));
}

TEST_CASE("exit codes") {
    CHECK(call({"pvar", "--in", "missing.csv"}).code == 2);
    CHECK(call({"saw", "--n", "3", "--v", "1", "--bogus"}).code == 2);
    CHECK(call({"nosuch"}).code == 2);
    CHECK(call({}).code == 2);
    CHECK(call({"saw", "--n", "0", "--v", "1"}).code == 2);
    CHECK(call({"--help"}).code == 0);

    // a field too stiff for 16 RK4 steps fails the Richardson check
    auto sys = write("stiff.json", R"({"schema": 1, "field": {"family": "linear", "state_dim": 1, "input_dim": 1,
        "matrices": [[[40]]]}, "x0": [1], "ode": {"steps": 16}})");
    auto drive = write("drive.csv", "time,kind,x1\n0,c,0\n1,c,1\n");
    auto r = call({"marcus", "--system", sys, "--drive", drive, "--out", (scratch() / "x.csv").string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("Richardson") != std::string::npos);
}

TEST_CASE("selftest passes") {
    auto r = call({"selftest"});
    CHECK(r.code == 0);
    CHECK(r.out.find("all_ok: true") != std::string::npos);
}

TEST_CASE("seeds") {
    auto model = write("model.json", kModel);
    auto need = call({"smalldev", "--model", model, "--p", "1.5", "--eps", "0.5", "--trials", "10"});
    CHECK(need.code == 2);

    auto a = call({"--json", "--seed", "4", "smalldev", "--model", model, "--p", "1.5", "--eps", "0.6", "--trials",
                   "200", "--workers", "1"});
    auto b = call({"--json", "--seed", "4", "smalldev", "--model", model, "--p", "1.5", "--eps", "0.6", "--trials",
                   "200", "--workers", "3"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);

    setenv("PVARLEVY_SEED", "4", 1);
    auto c = call({"--json", "--seed", "99", "smalldev", "--model", model, "--p", "1.5", "--eps", "0.6", "--trials",
                   "200"});
    unsetenv("PVARLEVY_SEED");
    CHECK(c.out == a.out);
}

TEST_CASE("byte-identical outputs") {
    auto model = write("model.json", kModel);
    auto f1 = (scratch() / "a.csv").string(), f2 = (scratch() / "b.csv").string();
    CHECK(call({"simulate", "--model", model, "--T", "3", "--seed", "12", "--out", f1}).code == 0);
    CHECK(call({"simulate", "--model", model, "--T", "3", "--seed", "12", "--out", f2}).code == 0);
    CHECK(slurp(f1) == slurp(f2));
    CHECK(!slurp(f1).empty());

    auto r = call({"--json", "pvar", "--in", f1, "--p", "1"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["pvar"].get<double>() > 0.0);
}

TEST_CASE("config files and reports") {
    auto model = write("model.json", kModel);
    auto cfg = write("cfg.json", std::string(R"({"schema": 1, "model": ")") + model +
                                     R"(", "p": 1.5, "eps": 0.6, "trials": 40})");
    auto report = (scratch() / "report.json").string();
    auto r = call({"--seed", "3", "--report", report, "smalldev", "--config", cfg, "--trials", "20"});
    CHECK(r.code == 0);
    auto rep = nlohmann::json::parse(slurp(report));
    CHECK(rep["results"]["trials"] == 20);
    CHECK(rep["provenance"]["seed"] == 3);
    CHECK(rep["provenance"].contains("git_describe"));
    CHECK(rep["provenance"]["wall_time_s"].get<double>() >= 0.0);

    auto bad = write("bad.json", R"({"schema": 1, "nonsense": 2})");
    CHECK(call({"--seed", "3", "smalldev", "--config", bad}).code == 2);
    auto noschema = write("noschema.json", R"({"p": 1.5})");
    CHECK(call({"smalldev", "--config", noschema}).code == 2);
}

TEST_CASE("stable-ball writes data and a plot script") {
    auto csv = (scratch() / "sb.csv").string(), gp = (scratch() / "sb.gp").string();
    auto r = call({"stable-ball", "--beta", "0.5", "--gamma", "1", "--clambda", "1", "--eps-grid", "1e-2,1e-4",
                   "--out", csv, "--gnuplot", gp});
    CHECK(r.code == 0);
    auto text = slurp(csv);
    CHECK(text.rfind("eps,log_p,scaled", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(slurp(gp).find("plot") != std::string::npos);
    CHECK(call({"stable-ball", "--beta", "1", "--gamma", "0.5"}).code == 2);
}

TEST_CASE("classify and witness") {
    auto model = write("stable.json", R"({"schema": 1, "dimension": 1,
        "stable": {"beta": 0.5, "sphere": [{"direction": [1], "weight": 0.05}]}, "K_basis": [[1]], "L_basis": []})");
    auto c = call({"--json", "classify", "--model", model, "--p", "1.5"});
    CHECK(c.code == 0);
    CHECK(nlohmann::json::parse(c.out)["verdict"] == "K_full_drift_nonzero");
    auto w = call({"--json", "--seed", "1", "witness", "--model", model, "--p", "1.5", "--eps", "0.3", "--eta", "8e-3",
                   "--draws", "50"});
    CHECK(w.code == 0);
    auto j = nlohmann::json::parse(w.out);
    CHECK(j["verification"]["ok"] == true);
    CHECK(j["conditioned_draws"]["passed"] == 50);
}
