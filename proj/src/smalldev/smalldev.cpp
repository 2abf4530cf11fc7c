#include "pvarlevy/smalldev.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pvarlevy/errors.hpp"
#include "pvarlevy/parallel.hpp"

namespace pvarlevy {

Interval wilson_interval(long long hits, long long trials, double z) {
    if (trials <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (ph + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
    Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    // keep prob inside the interval against rounding at the edges
    out.lo = std::min(out.lo, ph);
    out.hi = std::max(out.hi, ph);
    return out;
}

DeviationEstimate estimate_small_deviation(const LevyModel& model, double T, double p, double epsilon,
                                           long long trials, double eta, std::uint64_t seed, unsigned workers) {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (!(T > 0.0)) throw ValidationError("T must be positive");
    if (!(eta > 0.0)) throw ValidationError("eta must be positive");
    if (!(p >= 1.0)) throw ValidationError("p must be >= 1");
    LevyModel m = decompensate(model);
    if (p < 2.0) check_pvariation(m, p);

    std::vector<unsigned char> hit(static_cast<std::size_t>(trials), 0);
    parallel_for(hit.size(), workers, [&](std::size_t i) {
        Rng rng = make_stream(seed, i);
        CadlagPath path = sample_path(m, T, eta, rng);
        hit[i] = pvar_exact(path, p).value < epsilon ? 1 : 0;
    });

    DeviationEstimate est;
    est.epsilon = epsilon;
    est.T = T;
    est.p = p;
    est.eta = eta;
    est.trials = trials;
    est.hits = std::accumulate(hit.begin(), hit.end(), 0LL);
    est.prob = static_cast<double>(est.hits) / static_cast<double>(trials);
    est.ci95 = wilson_interval(est.hits, trials);
    est.dropped_p_moment = small_jump_p_moment(m, eta, p);
    return est;
}

// ---------------------------------------------------------------- witness

namespace {

constexpr double kPi = 3.14159265358979323846;

double angle_between(const Point& a, const Point& b) {
    double c = a.dot(b) / (a.norm() * b.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

// Projection used for the compensator: onto L when dim L = 1, identity when L = {0}.
Point compensator_part(const LevyModel& m, const Point& x) { return m.L.rank() == 1 ? m.L.project(x) : x; }

CadlagPath event_path(std::size_t d, double T, const Point& slope, const std::vector<double>& times,
                      const std::vector<Point>& sizes) {
    PathBuilder b(d);
    Point x(d);
    double last = 0.0;
    b.add(0.0, x);
    for (std::size_t k = 0; k < times.size(); ++k) {
        Point pre = x + (times[k] - last) * slope;
        Point post = pre + sizes[k];
        b.add_jump(times[k], pre, post);
        x = std::move(post);
        last = times[k];
    }
    if (last < T) b.add(T, x + (T - last) * slope);
    return std::move(b).build();
}

std::vector<double> target_times(int gamma, double T) {
    std::vector<double> s(static_cast<std::size_t>(gamma));
    for (int k = 1; k <= gamma; ++k) s[k - 1] = k == gamma ? T : k * T / gamma;
    return s;
}

int nearest_count(const Point& v, const Point& x, double T) {
    // minimiser of |T v - g x| over integers g >= 0, ties away from zero
    double ratio = T * v.dot(x) / x.squared_norm();
    return ratio <= 0.0 ? 0 : static_cast<int>(std::round(ratio));
}

struct Trial {
    bool ok = false;
    int gamma = 0;
    Point v_rho;
    double mass = 0.0;
};

// Every corner configuration of the windows (times and sizes pushed to the
// window edges in four patterns each) must give p-variation below epsilon.
bool corners_pass(std::size_t d, double T, double p, double epsilon, const Point& slope, const Point& x, int gamma,
                  double lambda) {
    const auto s = target_times(gamma, T);
    const Point u = (1.0 / x.norm()) * x;
    auto sign = [](int pattern, int k) {
        switch (pattern) {
            case 0: return -1.0;
            case 1: return 1.0;
            case 2: return k % 2 == 0 ? 1.0 : -1.0;
            default: return k % 2 == 0 ? -1.0 : 1.0;
        }
    };
    std::vector<double> times(s.size());
    std::vector<Point> sizes(s.size());
    for (int tp = 0; tp < 4; ++tp)
        for (int sp = 0; sp < 4; ++sp) {
            for (int k = 0; k < gamma; ++k) {
                times[k] = std::min(T, s[k] + sign(tp, k) * lambda);
                sizes[k] = x + (sign(sp, k) * lambda) * u;
            }
            if (!(pvar_exact(event_path(d, T, slope, times, sizes), p).value < epsilon)) return false;
        }
    return true;
}

}  // namespace

WitnessEvent construct_witness_dim1(const LevyModel& model, double T, double p, double epsilon, double eta,
                                    double rho) {
    if (!(T > 0.0) || !(epsilon > 0.0)) throw ValidationError("T and epsilon must be positive");
    if (!(p >= 1.0)) throw ValidationError("p must be >= 1");
    if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("eta must lie in (0, 1]");
    if (!(rho > 0.0 && rho < kPi / 2.0)) throw ValidationError("rho must lie in (0, pi/2)");
    if (model.L.rank() > 1) throw ValidationError("witness constructor needs dim L <= 1");

    const std::size_t d = model.dim;
    WitnessEvent w;
    w.eta = eta;
    w.rho = rho;
    w.saw = {0, T, Point(d)};
    w.x = Point(d);
    w.jump_rate = retained_rate(model, eta);

    const Point retained = retained_compensator(model, eta);
    const Point v = compensator_part(model, retained);
    w.v = v;
    w.compensator_slope = -v;
    if (v.norm() <= 1e-14 * std::max(1.0, retained.norm())) {
        w.v = Point(d);
        w.compensator_slope = Point(d);
        return w;
    }

    // support point below eta closest in angle to v
    Point best;
    double best_angle = HUGE_VAL;
    auto consider = [&](const Point& c) {
        double n = c.norm();
        if (!(n > 0.0 && n < eta)) return;
        double a = angle_between(c, v);
        if (a < best_angle) {
            best_angle = a;
            best = c;
        }
    };
    for (const auto& sc : model.stable)
        for (const auto& sa : sc.sphere)
            if (sa.weight > 0.0) consider((eta / 2.0) * sa.direction);
    for (const auto* atoms : {&model.atoms, &model.wedge_atoms})
        for (const auto& a : *atoms)
            if (a.rate > 0.0) consider(a.point);
    if (!(best_angle <= rho)) throw ValidationError("no support point below eta within angle rho of the compensator");
    const Point x = best;
    w.x = x;

    const double cap = std::min(x.norm() / 2.0, 0.999 * (eta - x.norm()));
    auto trial = [&](double lambda) {
        Trial t;
        BallMoments bm = ball_moments(model, x, lambda);
        t.v_rho = v + compensator_part(model, bm.first);
        t.mass = bm.mass;
        t.gamma = nearest_count(t.v_rho, x, T);
        if (t.gamma == 0) {
            t.ok = true;
            return t;
        }
        if (lambda > T / (4.0 * t.gamma)) return t;
        t.ok = corners_pass(d, T, p, epsilon, -t.v_rho, x, t.gamma, lambda);
        return t;
    };

    double lo = 0.0, hi = cap;
    Trial chosen = trial(hi);
    double lambda = hi;
    if (!chosen.ok) {
        // shrink until a passing lambda is bracketed, then bisect
        double probe = hi;
        Trial t;
        for (int i = 0; i < 60; ++i) {
            probe /= 2.0;
            t = trial(probe);
            if (t.ok) break;
        }
        if (!t.ok) throw NumericalError("witness windows fail the path-level check for every lambda; epsilon too small");
        lo = probe;
        hi = 2.0 * probe;
        chosen = t;
        for (int i = 0; i < 30; ++i) {
            double mid = 0.5 * (lo + hi);
            Trial tm = trial(mid);
            if (tm.ok) {
                lo = mid;
                chosen = tm;
            } else {
                hi = mid;
            }
        }
        lambda = lo;
    }

    w.lambda = lambda;
    w.v = chosen.v_rho;
    w.compensator_slope = -chosen.v_rho;
    if (chosen.gamma == 0) {
        w.lambda = 0.0;
        return w;
    }
    w.saw = {chosen.gamma, T, -x};
    w.jump_rate = retained_rate(model, eta) + chosen.mass;
    for (double s : target_times(chosen.gamma, T)) w.windows.push_back({s, x, lambda});
    return w;
}

CadlagPath witness_skeleton(const WitnessEvent& w) {
    const std::size_t d = w.compensator_slope.dim();
    std::vector<double> times;
    std::vector<Point> sizes;
    for (const auto& win : w.windows) {
        times.push_back(win.time);
        sizes.push_back(win.size);
    }
    return event_path(d, w.saw.T, w.compensator_slope, times, sizes);
}

SkeletonCheck verify_witness_skeleton(const WitnessEvent& w, double p, double epsilon) {
    SkeletonCheck out;
    CadlagPath skel = witness_skeleton(w);
    out.skeleton_pvar = pvar_exact(skel, p).value;
    if (w.gamma() == 0) {
        out.sum = w.saw.T * w.compensator_slope.norm();
    } else {
        CadlagPath saw = make_saw(w.saw);
        CadlagPath rest = combine(skel, saw, 1.0, -1.0);
        out.sum = pvar_exact(saw, p).value + pvar_exact(rest, p).value;
    }
    out.ok = out.sum < epsilon;
    return out;
}

WitnessProbability conditioned_witness_probability(const LevyModel& model, const WitnessEvent& w) {
    WitnessProbability out;
    const double T = w.saw.T;
    double lv = -w.jump_rate * T;
    if (w.gamma() > 0) {
        const double mass = ball_moments(model, w.x, w.lambda).mass;
        if (!(mass > 0.0)) throw NumericalError("witness ball carries no Levy mass");
        for (const auto& win : w.windows) {
            double len = std::min(win.time + win.lambda, T) - (win.time - win.lambda);
            lv += std::log(len * mass);
        }
    }
    out.log_value = lv;
    out.value = std::exp(lv);
    return out;
}

CadlagPath conditioned_draw(const LevyModel& model, const WitnessEvent& w, Rng& rng) {
    const double T = w.saw.T;
    std::vector<double> times;
    std::vector<Point> sizes;
    for (const auto& win : w.windows) {
        double a = win.time - win.lambda, b = std::min(win.time + win.lambda, T);
        std::uniform_real_distribution<double> ut(a, b);
        times.push_back(ut(rng));
        sizes.push_back(sample_in_ball(model, win.size, win.lambda, rng));
    }
    return event_path(w.compensator_slope.dim(), T, w.compensator_slope, times, sizes);
}

// ---------------------------------------------------------------- small balls

namespace {

void check_params(const StableSmallBallParams& s) {
    if (!(s.beta > 0.0 && s.beta < 2.0)) throw ValidationError("beta must lie in (0, 2)");
    if (!(s.gamma > s.beta)) throw ValidationError("gamma must exceed beta");
    if (!(s.c_lambda > 0.0)) throw ValidationError("c_lambda must be positive");
}

}  // namespace

double stable_small_ball_constant(const StableSmallBallParams& s) {
    check_params(s);
    const double g = s.gamma, b = s.beta;
    // logs keep the gamma -> beta limit from overflowing
    double lg = std::log(g - b) + (b / (g - b)) * (std::log(s.c_lambda) + std::lgamma(1.0 - b / g)) -
                (g / (g - b)) * std::log(g);
    return std::exp(lg);
}

double subordinator_scale(const StableSmallBallParams& s) {
    check_params(s);
    return s.c_lambda * std::tgamma(1.0 - s.delta()) / s.beta;
}

double stated_small_ball_limit(const StableSmallBallParams& s) {
    check_params(s);
    const double dl = s.delta();
    return (1.0 - dl) * std::pow(s.c_lambda * std::tgamma(1.0 - dl) / s.gamma, dl / (1.0 - dl));
}

double debruijn_limit(double delta, double a) {
    if (!(delta > 0.0 && delta < 1.0) || !(a > 0.0)) throw ValidationError("need delta in (0,1) and a > 0");
    return (1.0 - delta) * std::pow(delta, delta / (1.0 - delta)) * std::pow(a, 1.0 / (1.0 - delta));
}

double log_erfc(double x) {
    if (x < 20.0) return std::log(std::erfc(x));
    // erfc x = e^{-x^2}/(x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6) + 105/(16x^8) ...)
    const double y = 1.0 / (2.0 * x * x);
    double series = 1.0, term = 1.0;
    for (int n = 1; n <= 8; ++n) {
        term *= -(2.0 * n - 1.0) * y;
        series += term;
    }
    return -x * x - std::log(x * std::sqrt(kPi)) + std::log(series);
}

double log_half_stable_cdf(double a, double eps) {
    if (!(eps > 0.0) || !(a > 0.0)) throw ValidationError("need a, eps > 0");
    return log_erfc(a / (2.0 * std::sqrt(eps)));
}

double gamma_jump_sum(const CadlagPath& path, double gamma) {
    if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
    double s = 0.0;
    for (const auto& j : jump_list(path)) s += std::pow(j.size.norm(), gamma);
    return s;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ValidationError("KS test needs non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double dmax = 0.0;
    while (i < a.size() && j < b.size()) {
        double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        dmax = std::max(dmax, std::abs(i / na - j / nb));
    }
    KsResult out;
    out.statistic = dmax;
    const double ne = na * nb / (na + nb);
    const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * dmax;
    // Kolmogorov tail Q(lam) = 2 sum (-1)^{k-1} e^{-2 k^2 lam^2}
    double q = 0.0;
    if (lam < 0.2) {
        q = 1.0;
    } else {
        for (int k = 1; k <= 100; ++k) {
            double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
            q += term;
            if (std::abs(term) < 1e-16) break;
        }
    }
    out.p_value = std::clamp(q, 0.0, 1.0);
    return out;
}

}  // namespace pvarlevy
