#pragma once

#include <cstdint>
#include <vector>

#include "pvarlevy/levy.hpp"
#include "pvarlevy/path.hpp"
#include "pvarlevy/pvar.hpp"

namespace pvarlevy {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval at the normal quantile z (95% by default).
Interval wilson_interval(long long hits, long long trials, double z = 1.959963984540054);

struct DeviationEstimate {
    double epsilon = 0.0;
    double T = 0.0;
    double p = 1.0;
    double eta = 0.0;
    long long hits = 0;
    long long trials = 0;
    double prob = 0.0;
    Interval ci95;
    /// int_{|z|<eta} |z|^p nu(dz): the truncation bias scale of the estimate.
    double dropped_p_moment = 0.0;
};

/// Fraction of `trials` simulated decompensated truncated paths with
/// p-variation below epsilon on [0, T]. Trial i uses stream (seed, i), so the
/// result does not depend on the worker count.
DeviationEstimate estimate_small_deviation(const LevyModel& model, double T, double p, double epsilon,
                                           long long trials, double eta, std::uint64_t seed,
                                           unsigned workers = 0);

struct JumpWindow {
    double time = 0.0;  ///< target time s_k
    Point size;         ///< target size x
    double lambda = 0.0;
};

struct WitnessEvent {
    SawParams saw;  ///< (gamma, T, -x)
    std::vector<JumpWindow> windows;
    double eta = 0.0;
    double rho = 0.0;
    double lambda = 0.0;
    Point x;                  ///< approximating support point, |x| < eta
    Point v;                  ///< v_rho = v^eta + int_V z nu, V the lambda-ball at x
    Point compensator_slope;  ///< -v_rho, the drift between jumps
    /// Total jump intensity of the witnessed process (|z| >= eta and V).
    double jump_rate = 0.0;
    int gamma() const { return saw.n; }
};

/// Witness of a positive-probability small-deviation event for models with
/// dim L <= 1: gamma jumps near x at the times kT/gamma cancel the drift
/// -v^eta, with v^eta = int_{eta<=|z|<=1} z_L nu(dz) (the full vector when L = {0}).
WitnessEvent construct_witness_dim1(const LevyModel& model, double T, double p, double epsilon, double eta,
                                    double rho = 0.1);

struct SkeletonCheck {
    bool ok = false;
    /// |||Saw|||_p + |||skeleton - Saw|||_p, an upper bound for |||skeleton|||_p.
    double sum = 0.0;
    double skeleton_pvar = 0.0;
};

/// Deterministic path with jumps exactly x at exactly s_k and drift -v.
CadlagPath witness_skeleton(const WitnessEvent& w);
SkeletonCheck verify_witness_skeleton(const WitnessEvent& w, double p, double epsilon);

struct WitnessProbability {
    double log_value = 0.0;  ///< log of the lower bound
    double value = 0.0;      ///< exp(log_value); underflows for large gamma
};

/// P[exactly gamma jumps on [0,T], the k-th in (s_k - lambda, s_k + lambda)
/// with size in the lambda-ball at x] = e^{-R T} prod_k |W_k| nu(ball).
WitnessProbability conditioned_witness_probability(const LevyModel& model, const WitnessEvent& w);

/// A path of the witnessed process drawn on that event.
CadlagPath conditioned_draw(const LevyModel& model, const WitnessEvent& w, Rng& rng);

struct StableSmallBallParams {
    double beta = 0.5;
    double gamma = 1.0;
    double c_lambda = 1.0;
    double delta() const { return beta / gamma; }
};

/// C_{beta,gamma} = (gamma - beta) (c_lambda Gamma(1 - beta/gamma))^{beta/(gamma-beta)} / gamma^{gamma/(gamma-beta)}.
double stable_small_ball_constant(const StableSmallBallParams& params);

/// Scale a of the subordinator S_1 = sum |dZ|^gamma: E exp(-u S_1) = exp(-a u^delta),
/// a = c_lambda Gamma(1 - delta) / beta.
double subordinator_scale(const StableSmallBallParams& params);

/// (1 - delta) (c_lambda Gamma(1 - delta) / gamma)^{delta/(1-delta)}, the limit of
/// eps^{delta/(1-delta)} (-log P[S_1 < eps]) that C_{beta,gamma} is built on.
double stated_small_ball_limit(const StableSmallBallParams& params);

/// (1 - delta) delta^{delta/(1-delta)} a^{1/(1-delta)}: the de Bruijn limit of
/// eps^{delta/(1-delta)} (-log P[S < eps]) when E exp(-u S) = exp(-a u^delta).
double debruijn_limit(double delta, double a);

/// log erfc(x), accurate for large x where erfc underflows.
double log_erfc(double x);

/// log P[S < eps] for delta = 1/2: P = erfc(a / (2 sqrt(eps))).
double log_half_stable_cdf(double a, double eps);

/// sum |dZ|^gamma over the jumps of the path.
double gamma_jump_sum(const CadlagPath& path, double gamma);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace pvarlevy
