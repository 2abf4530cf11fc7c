#include "pvarlevy/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "pvarlevy/errors.hpp"
#include "pvarlevy/fixtures.hpp"
#include "pvarlevy/levy.hpp"
#include "pvarlevy/marcus.hpp"
#include "pvarlevy/parallel.hpp"
#include "pvarlevy/pvar.hpp"
#include "pvarlevy/smalldev.hpp"
#include "pvarlevy/version.hpp"

namespace pvarlevy::cli {

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kCommands = {"simulate", "pvar",    "saw",     "smalldev", "witness",
                                            "stable-ball", "marcus", "support", "classify", "selftest"};

json to_json(const Point& p) { return json(p.vec()); }

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Point parse_point(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        double x = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0' || !std::isfinite(x)) throw ValidationError("bad number '" + item + "' in '" + s + "'");
        v.push_back(x);
    }
    if (v.empty()) throw ValidationError("empty vector '" + s + "'");
    return Point(std::move(v));
}

std::ofstream open_out(const std::string& file) {
    std::ofstream os(file);
    if (!os) throw ValidationError("cannot write '" + file + "'");
    return os;
}

void write_path_csv(const std::string& file, const CadlagPath& path) {
    auto os = open_out(file);
    write_csv(os, path);
}

// Plots columns 2.. of a CSV against column 1.
void write_gnuplot(const std::string& file, const std::string& csv, const std::vector<std::string>& columns,
                   const std::string& title, bool logx = false) {
    auto os = open_out(file);
    os << "set datafile separator ','\n";
    os << "set key autotitle columnhead\n";
    os << "set title '" << title << "'\n";
    if (logx) os << "set logscale x\n";
    os << "plot ";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) os << ", \\\n     ";
        os << "'" << csv << "' using 1:'" << columns[i] << "' with linespoints";
    }
    os << "\n";
}

void print_human(std::ostream& out, const json& j, const std::string& indent = "") {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const json& v = it.value();
        if (v.is_object()) {
            out << indent << it.key() << ":\n";
            print_human(out, v, indent + "  ");
        } else if (v.is_array() && !v.empty() && v.front().is_object()) {
            out << indent << it.key() << ":\n";
            std::vector<std::string> keys;
            for (auto k = v.front().begin(); k != v.front().end(); ++k) keys.push_back(k.key());
            out << indent << "  ";
            for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "\t" : "") << keys[i];
            out << "\n";
            for (const auto& row : v) {
                out << indent << "  ";
                for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "\t" : "") << row[keys[i]].dump();
                out << "\n";
            }
        } else {
            out << indent << it.key() << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
    }
}

struct Globals {
    bool as_json = false;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
    std::string report;
};

std::uint64_t resolve_seed(const Globals& g) {
    if (const char* env = std::getenv("PVARLEVY_SEED"); env && *env) {
        char* end = nullptr;
        unsigned long long s = std::strtoull(env, &end, 10);
        if (*end != '\0') throw ValidationError("PVARLEVY_SEED must be an unsigned integer");
        return s;
    }
    if (!g.seed) throw ValidationError("this command needs --seed (or PVARLEVY_SEED)");
    return *g.seed;
}

// Turns `--config file.json` into ordinary options placed right after the
// subcommand, so explicit flags given later win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    auto it = std::find(args.begin(), args.end(), "--config");
    if (it == args.end()) return args;
    if (it + 1 == args.end()) throw ValidationError("--config needs a file");
    std::string file = *(it + 1);
    args.erase(it, it + 2);
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open config '" + file + "'");
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw ValidationError("config must be a JSON object");
    if (!cfg.contains("schema") || cfg["schema"] != 1) throw ValidationError("config needs \"schema\": 1");
    std::vector<std::string> extra;
    for (auto e = cfg.begin(); e != cfg.end(); ++e) {
        if (e.key() == "schema") continue;
        const auto& v = e.value();
        if (v.is_boolean()) {
            if (v.get<bool>()) extra.push_back("--" + e.key());
        } else if (v.is_array()) {
            std::string joined;
            for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? "," : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
            extra.push_back("--" + e.key());
            extra.push_back(joined);
        } else {
            extra.push_back("--" + e.key());
            extra.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
    }
    auto sub = std::find_first_of(args.begin(), args.end(), kCommands.begin(), kCommands.end());
    if (sub == args.end()) throw ValidationError("--config needs a subcommand");
    args.insert(sub + 1, extra.begin(), extra.end());
    return args;
}

// ---------------------------------------------------------------- commands

json cmd_simulate(const Globals& g, const std::string& model_file, double T, double eta, std::uint64_t index,
                  bool decomp, const std::string& out_file, const std::string& gp, json& inputs) {
    LevyModel m = load_model(model_file);
    if (decomp) m = decompensate(m);
    const std::uint64_t seed = resolve_seed(g);
    inputs["seed"] = seed;
    Rng rng = make_stream(seed, index);
    CadlagPath path = sample_path(m, T, eta, rng);
    write_path_csv(out_file, path);
    if (!gp.empty()) {
        std::vector<std::string> cols;
        for (std::size_t i = 1; i <= path.dim(); ++i) cols.push_back("x" + std::to_string(i));
        write_gnuplot(gp, out_file, cols, "sample path");
    }
    json r;
    r["nodes"] = path.size();
    r["jumps"] = jump_list(path).size();
    r["final"] = to_json(path.point(path.size() - 1));
    r["drift_between_jumps"] = to_json(truncated_drift(m, eta));
    r["retained_rate"] = retained_rate(m, eta);
    r["out"] = out_file;
    return r;
}

kernels::Isa parse_isa(const std::string& s) {
    if (s == "auto") return kernels::detect_isa();
    if (s == "scalar") return kernels::Isa::Scalar;
    if (s == "avx2") {
        if (!kernels::avx2_supported()) throw ValidationError("this CPU has no AVX2");
        return kernels::Isa::Avx2;
    }
    throw ValidationError("--isa must be auto, scalar or avx2");
}

json cmd_pvar(const std::string& in, double p, const std::string& isa, bool no_prune, bool partition) {
    CadlagPath path = load_csv(in);
    PVarOptions opts;
    opts.isa = parse_isa(isa);
    opts.prune = !no_prune;
    PVarOutcome o = pvar_exact(path, p, opts);
    json r;
    r["nodes"] = path.size();
    r["p"] = p;
    r["pvar"] = o.value;
    r["pvar_p"] = o.power_sum;
    r["partition_size"] = o.partition.size();
    r["isa"] = kernels::to_string(opts.isa);
    if (partition) r["partition"] = o.partition;
    return r;
}

json cmd_saw(int n, double T, const std::string& v, double p, const std::string& out_file) {
    SawParams sp{n, T, parse_point(v)};
    if (n < 1 || !(T > 0.0)) throw ValidationError("saw needs n >= 1 and T > 0");
    CadlagPath saw = make_saw(sp);
    PVarOutcome o = pvar_exact(saw, p);
    if (!out_file.empty()) write_path_csv(out_file, saw);
    json r;
    r["pvar"] = o.value;
    r["pvar^p"] = o.power_sum;
    r["2n|v|^p"] = 2.0 * n * std::pow(sp.v.norm(), p);
    return r;
}

json estimate_json(const DeviationEstimate& e) {
    json r;
    r["epsilon"] = e.epsilon;
    r["T"] = e.T;
    r["p"] = e.p;
    r["eta"] = e.eta;
    r["hits"] = e.hits;
    r["trials"] = e.trials;
    r["prob"] = e.prob;
    r["ci95"] = {e.ci95.lo, e.ci95.hi};
    r["dropped_p_moment"] = e.dropped_p_moment;
    return r;
}

json cmd_witness(const Globals& g, const std::string& model_file, double T, double p, double eps, double eta,
                 double rho, int draws, json& inputs) {
    LevyModel m = load_model(model_file);
    WitnessEvent w = construct_witness_dim1(m, T, p, eps, eta, rho);
    SkeletonCheck c = verify_witness_skeleton(w, p, eps);
    WitnessProbability pr = conditioned_witness_probability(m, w);
    json r;
    json wj;
    wj["gamma"] = w.gamma();
    wj["x"] = to_json(w.x);
    wj["v_rho"] = to_json(w.v);
    wj["lambda"] = w.lambda;
    wj["eta"] = w.eta;
    wj["rho"] = w.rho;
    wj["compensator_slope"] = to_json(w.compensator_slope);
    wj["saw"] = {{"n", w.saw.n}, {"T", w.saw.T}, {"v", to_json(w.saw.v)}};
    wj["window_times"] = [&] {
        std::vector<double> t;
        for (const auto& win : w.windows) t.push_back(win.time);
        return t;
    }();
    r["witness"] = wj;
    r["verification"] = {{"ok", c.ok}, {"sum", c.sum}, {"skeleton_pvar", c.skeleton_pvar}, {"epsilon", eps}};
    r["log_probability"] = pr.log_value;
    r["probability"] = pr.value;
    if (draws > 0) {
        const std::uint64_t seed = resolve_seed(g);
        inputs["seed"] = seed;
        std::vector<unsigned char> ok(static_cast<std::size_t>(draws));
        parallel_for(ok.size(), g.workers, [&](std::size_t i) {
            Rng rng = make_stream(seed, i);
            ok[i] = pvar_exact(conditioned_draw(m, w, rng), p).value < eps;
        });
        long long passed = std::count(ok.begin(), ok.end(), 1);
        r["conditioned_draws"] = {{"draws", draws}, {"passed", passed},
                                  {"fraction", static_cast<double>(passed) / draws}};
    }
    return r;
}

std::vector<double> parse_grid(const std::string& s) {
    Point p = parse_point(s);
    for (double x : p.vec())
        if (!(x > 0.0)) throw ValidationError("grid values must be positive");
    return p.vec();
}

json cmd_stable_ball(double beta, double gamma, double clambda, const std::string& grid, const std::string& out_file,
                     const std::string& gp) {
    StableSmallBallParams sp{beta, gamma, clambda};
    const double C = stable_small_ball_constant(sp);
    const double dl = sp.delta();
    const double a = subordinator_scale(sp);
    const double stated = stated_small_ball_limit(sp);
    const double db = debruijn_limit(dl, a);
    const bool exact = std::abs(dl - 0.5) < 1e-15;
    json rows = json::array();
    for (double eps : parse_grid(grid)) {
        double logp = exact ? log_half_stable_cdf(a, eps) : std::nan("");
        double scaled = -std::pow(eps, dl / (1.0 - dl)) * logp;
        rows.push_back({{"eps", eps}, {"log_p", logp}, {"scaled", scaled}, {"stated_limit", stated},
                        {"debruijn_limit", db}});
    }
    if (!out_file.empty()) {
        auto os = open_out(out_file);
        os << "eps,log_p,scaled,stated_limit,debruijn_limit\n";
        for (const auto& r : rows)
            os << num(r["eps"]) << ',' << num(r["log_p"]) << ',' << num(r["scaled"]) << ',' << num(r["stated_limit"])
               << ',' << num(r["debruijn_limit"]) << '\n';
        if (!gp.empty())
            write_gnuplot(gp, out_file, {"scaled", "stated_limit", "debruijn_limit"},
                          "scaled small-ball log-probability", true);
    }
    json r;
    r["C"] = C;
    r["delta"] = dl;
    r["subordinator_scale"] = a;
    r["stated_limit"] = stated;
    r["debruijn_limit"] = db;
    r["exact_cdf"] = exact;
    // NaN is not JSON; rows without a closed form carry null
    for (auto& row : rows)
        for (auto& v : row)
            if (v.is_number_float() && std::isnan(v.get<double>())) v = nullptr;
    r["rows"] = rows;
    return r;
}

json cmd_marcus(const std::string& sys_file, const std::string& drive_file, const std::string& out_file,
                const std::string& gp) {
    MarcusSystem s = load_system(sys_file);
    CadlagPath drive = load_csv(drive_file);
    CadlagPath x = solve_marcus(s, drive);
    write_path_csv(out_file, x);
    if (!gp.empty()) {
        std::vector<std::string> cols;
        for (std::size_t i = 1; i <= x.dim(); ++i) cols.push_back("x" + std::to_string(i));
        write_gnuplot(gp, out_file, cols, "Marcus solution");
    }
    json r;
    r["nodes"] = x.size();
    r["x_T"] = to_json(x.point(x.size() - 1));
    r["field"] = to_string(s.f.family);
    r["out"] = out_file;
    return r;
}

json cmd_support(const Globals& g, const std::string& sys_file, const std::string& cand_file,
                 const std::string& model_file, int samples, double eta, double p, int n, const std::string& out_file,
                 json& inputs) {
    MarcusSystem s = load_system(sys_file);
    SupportCurveSpec spec = load_support_spec(cand_file);
    LevyModel m = load_model(model_file);
    if (samples < 1) throw ValidationError("--samples must be >= 1");
    const double T = spec.phi_L.end_time();
    if (T < n + 1) throw ValidationError("support candidate must cover [0, n+1]");
    CadlagPath psi = solve_support_ode(spec, s.f, s.x0, s.ode);
    const std::uint64_t seed = resolve_seed(g);
    inputs["seed"] = seed;
    std::vector<SupportDistance> d(static_cast<std::size_t>(samples));
    parallel_for(d.size(), g.workers, [&](std::size_t i) {
        Rng rng = make_stream(seed, i);
        CadlagPath x = solve_marcus(s, sample_path(m, T, eta, rng));
        d[i] = support_distance(x, psi, p, n);
    });
    std::vector<double> v;
    for (const auto& e : d) v.push_back(e.value);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    if (!out_file.empty()) {
        auto os = open_out(out_file);
        os << "sample,distance,family,aligned\n";
        for (std::size_t i = 0; i < d.size(); ++i)
            os << i << ',' << num(d[i].value) << ',' << d[i].family << ',' << (d[i].aligned ? 1 : 0) << '\n';
    }
    json r;
    r["samples"] = samples;
    r["min"] = sorted.front();
    r["median"] = sorted[sorted.size() / 2];
    r["max"] = sorted.back();
    r["unaligned"] = std::count_if(d.begin(), d.end(), [](const SupportDistance& e) { return !e.aligned; });
    return r;
}

json cmd_classify(const std::string& model_file, double p) {
    LevyModel m = load_model(model_file);
    SmallDevVerdict v = corollary_a_classify(m, p);
    ConeGeometry c = cone_geometry(m);
    json r;
    r["verdict"] = to_string(v.verdict);
    r["details"] = v.details;
    r["generalized_drift"] = to_json(generalized_drift(m));
    r["dim_K"] = m.K.rank();
    r["dim_L"] = m.L.rank();
    json gens = json::array();
    for (const auto& x : c.generators) gens.push_back(to_json(x));
    r["cone_generators"] = gens;
    r["strictly_convex"] = c.strictly_convex;
    return r;
}

// Quick oracle and closed-form checks; one row per check.
json cmd_selftest(bool& all_ok) {
    json rows = json::array();
    auto record = [&](const std::string& name, bool ok, double worst) {
        rows.push_back({{"check", name}, {"ok", ok}, {"worst", worst}});
        all_ok = all_ok && ok;
    };
    {
        double worst = 0.0;
        for (int n : {1, 3, 7})
            for (double p : {1.0, 1.5, 2.0}) {
                double got = pvar_exact(make_saw({n, 1.0, Point{0.6, -0.8}}), p).power_sum;
                worst = std::max(worst, std::abs(got / (2.0 * n) - 1.0));
            }
        record("saw_closed_form", worst < 1e-9, worst);
    }
    {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst = 0.0;
        int mismatches = 0;
        for (int c = 0; c < 200; ++c) {
            std::size_t nodes = 2 + c % 9;
            PathBuilder b(2);
            for (std::size_t i = 0; i < nodes; ++i) b.add(static_cast<double>(i), Point{u(rng), u(rng)});
            CadlagPath path = std::move(b).build();
            for (double p : {1.0, 1.3, 1.7, 1.99}) {
                double a = pvar_exact(path, p).power_sum, bf = pvar_bruteforce(path, p).power_sum;
                if (a != bf) ++mismatches;
                worst = std::max(worst, std::abs(a - bf));
            }
        }
        record("dp_vs_bruteforce", mismatches == 0, worst);
    }
    if (kernels::avx2_supported()) {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> nd;
        int diff = 0;
        for (int c = 0; c < 20; ++c) {
            PathBuilder b(3);
            for (int i = 0; i < 300; ++i) b.add(i, Point{nd(rng), nd(rng), nd(rng)});
            CadlagPath path = std::move(b).build();
            for (double p : {1.0, 1.4, 2.0, 2.7}) {
                PVarOptions s, v;
                s.isa = kernels::Isa::Scalar;
                v.isa = kernels::Isa::Avx2;
                diff += pvar_exact(path, p, s).power_sum != pvar_exact(path, p, v).power_sum;
            }
        }
        record("scalar_vs_avx2", diff == 0, diff);
    }
    {
        MarcusSystem s{VectorFieldSpec::linear(1, {{1.0}}), Point{1.0}, {}};
        auto m = fixtures::atoms_only(Point{0.2}, {{Point{0.5}, 2.0}, {Point{-0.3}, 2.0}});
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            Rng rng = make_stream(3, i);
            CadlagPath d = sample_path(m, 1.0, 1e-3, rng);
            double x = solve_marcus(s, d).point(d.size() - 1)[0];
            worst = std::max(worst, std::abs(x / std::exp(d.point(d.size() - 1)[0]) - 1.0));
        }
        record("marcus_exponential", worst < 1e-6, worst);
    }
    {
        double c = stable_small_ball_constant({0.5, 1.0, 1.0});
        double e = std::abs(c / (0.5 * std::sqrt(std::acos(-1.0))) - 1.0);
        record("small_ball_constant", e < 1e-12, e);
    }
    json r;
    r["checks"] = rows;
    r["all_ok"] = all_ok;
    return r;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    CLI::App app{"p-variation tools for Levy paths", "pvarlevy"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Globals g;
    std::uint64_t seed_value = 0;
    app.add_flag("--json", g.as_json, "machine-readable JSON on stdout");
    auto* seed_opt = app.add_option("--seed", seed_value, "random seed (PVARLEVY_SEED overrides)");
    app.add_option("--workers", g.workers, "worker threads (0 = all cores)");
    app.add_option("--report", g.report, "write the JSON report with provenance to this file");
    app.fallthrough();

    std::string model, in_file, out_file, gp, isa = "auto", vstr, grid = "1e-2,1e-3,1e-4,1e-5,1e-6", system, drive,
                                          candidate;
    double T = 1.0, eta = 1e-3, p = 1.5, eps = 0.5, rho = 0.1, beta = 0.5, gamma = 1.0, clambda = 1.0;
    int n = 1, draws = 0, samples = 10, support_n = 1;
    long long trials = 1000;
    std::uint64_t index = 0;
    bool decomp = false, no_prune = false, partition = false;

    auto* sim = app.add_subcommand("simulate", "sample a truncated Levy path");
    sim->add_option("--model", model)->required();
    sim->add_option("--T", T);
    sim->add_option("--eta", eta);
    sim->add_option("--index", index, "stream index within the seed");
    sim->add_flag("--decompensate", decomp);
    sim->add_option("--out", out_file)->required();
    sim->add_option("--gnuplot", gp);

    auto* pv = app.add_subcommand("pvar", "exact p-variation of a path CSV");
    pv->add_option("--in", in_file)->required();
    pv->add_option("--p", p);
    pv->add_option("--isa", isa);
    pv->add_flag("--no-prune", no_prune);
    pv->add_flag("--partition", partition);

    auto* saw = app.add_subcommand("saw", "p-variation of a saw function");
    saw->add_option("--n", n)->required();
    saw->add_option("--T", T);
    saw->add_option("--v", vstr)->required();
    saw->add_option("--p", p);
    saw->add_option("--out", out_file);

    auto* sd = app.add_subcommand("smalldev", "Monte Carlo small-deviation probability");
    sd->add_option("--model", model)->required();
    sd->add_option("--T", T);
    sd->add_option("--p", p);
    sd->add_option("--eps", eps)->required();
    sd->add_option("--trials", trials);
    sd->add_option("--eta", eta);

    auto* wit = app.add_subcommand("witness", "saw-function witness for dim L <= 1");
    wit->add_option("--model", model)->required();
    wit->add_option("--T", T);
    wit->add_option("--p", p);
    wit->add_option("--eps", eps)->required();
    wit->add_option("--eta", eta);
    wit->add_option("--rho", rho);
    wit->add_option("--draws", draws, "conditioned draws to check");

    auto* sb = app.add_subcommand("stable-ball", "stable small-ball constants");
    sb->add_option("--beta", beta);
    sb->add_option("--gamma", gamma);
    sb->add_option("--clambda", clambda);
    sb->add_option("--eps-grid", grid);
    sb->add_option("--out", out_file);
    sb->add_option("--gnuplot", gp);

    auto* mc = app.add_subcommand("marcus", "solve a Marcus equation along a drive CSV");
    mc->add_option("--system", system)->required();
    mc->add_option("--drive", drive)->required();
    mc->add_option("--out", out_file)->required();
    mc->add_option("--gnuplot", gp);

    auto* sup = app.add_subcommand("support", "distances from simulated solutions to a support candidate");
    sup->add_option("--system", system)->required();
    sup->add_option("--candidate", candidate)->required();
    sup->add_option("--model", model)->required();
    sup->add_option("--samples", samples);
    sup->add_option("--eta", eta);
    sup->add_option("--p", p);
    sup->add_option("--n", support_n);
    sup->add_option("--out", out_file);

    auto* cl = app.add_subcommand("classify", "small-deviation case of a model");
    cl->add_option("--model", model)->required();
    cl->add_option("--p", p);

    auto* st = app.add_subcommand("selftest", "oracle and closed-form checks");

    std::vector<std::string> args;
    try {
        args = expand_config(raw_args);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kValidation;
    }
    if (*seed_opt) g.seed = seed_value;

    json inputs;
    for (const auto& a : raw_args) inputs["argv"].push_back(a);
    json results;
    int code = kOk;
    std::string command;
    try {
        if (*sim) {
            command = "simulate";
            results = cmd_simulate(g, model, T, eta, index, decomp, out_file, gp, inputs);
        } else if (*pv) {
            command = "pvar";
            results = cmd_pvar(in_file, p, isa, no_prune, partition);
        } else if (*saw) {
            command = "saw";
            results = cmd_saw(n, T, vstr, p, out_file);
        } else if (*sd) {
            command = "smalldev";
            const std::uint64_t seed = resolve_seed(g);
            inputs["seed"] = seed;
            results = estimate_json(estimate_small_deviation(load_model(model), T, p, eps, trials, eta, seed, g.workers));
        } else if (*wit) {
            command = "witness";
            results = cmd_witness(g, model, T, p, eps, eta, rho, draws, inputs);
        } else if (*sb) {
            command = "stable-ball";
            results = cmd_stable_ball(beta, gamma, clambda, grid, out_file, gp);
        } else if (*mc) {
            command = "marcus";
            results = cmd_marcus(system, drive, out_file, gp);
        } else if (*sup) {
            command = "support";
            results = cmd_support(g, system, candidate, model, samples, eta, p, support_n, out_file, inputs);
        } else if (*cl) {
            command = "classify";
            results = cmd_classify(model, p);
        } else if (*st) {
            command = "selftest";
            bool ok = true;
            results = cmd_selftest(ok);
            if (!ok) code = kNumerical;
        }
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternal;
    }

    if (g.as_json) {
        out << results.dump(2) << "\n";
    } else if (command == "saw") {
        out << "pvar^p = " << std::setprecision(12) << results["pvar^p"].get<double>() << "\n";
        out << "pvar = " << results["pvar"].get<double>() << "\n";
    } else {
        print_human(out, results);
    }
    if (!g.report.empty()) {
        json report;
        report["command"] = command;
        report["inputs"] = inputs;
        report["results"] = results;
        report["provenance"] = {
            {"git_describe", git_describe()},
            {"seed", inputs.contains("seed") ? inputs["seed"] : json(nullptr)},
            {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()}};
        try {
            auto os = open_out(g.report);
            os << report.dump(2) << "\n";
        } catch (const ValidationError& e) {
            err << "validation error: " << e.what() << "\n";
            return kValidation;
        }
    }
    return code;
}

}  // namespace pvarlevy::cli
