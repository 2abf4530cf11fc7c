#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "pvarlevy/kernels/row_max.hpp"
#include "pvarlevy/path.hpp"
#include "pvarlevy/point.hpp"

namespace pvarlevy {

/// A p-variation together with the node partition that attains it.
struct PVarOutcome {
    double value = 0.0;      ///< (sum |x_{i_j} - x_{i_{j-1}}|^p)^{1/p}
    double power_sum = 0.0;  ///< value^p as accumulated by the optimiser
    double p = 1.0;
    std::vector<std::size_t> partition;  ///< strictly increasing node indices
};

struct PVarOptions {
    kernels::Isa isa = kernels::detect_isa();
    /// Skip blocks of predecessors whose bounding box cannot beat the incumbent.
    bool prune = true;
};

/// Strong p-variation of a node path, p >= 1.
///
/// For piecewise-linear paths with explicit jumps the supremum over real
/// partitions is attained on node times: inserting a point interior to a
/// linear segment splits one increment into two collinear ones, and
/// a^p + b^p <= (a + b)^p for p >= 1. The optimiser is the O(n^2) programme
/// best[j] = max(0, max_{i<j} best[i] + |x_j - x_i|^p), ties resolved towards
/// the smaller predecessor index.
PVarOutcome pvar_exact(const CadlagPath& path, double p, const PVarOptions& opts = {});

/// Same programme on raw row-major values (n nodes of dimension dim).
PVarOutcome pvar_exact_values(std::span<const double> values, std::size_t dim, double p,
                              const PVarOptions& opts = {});

/// Exhaustive search over all increasing index subsequences; at most 20 nodes.
PVarOutcome pvar_bruteforce(const CadlagPath& path, double p);

/// Sum of |x_{i_j} - x_{i_{j-1}}|^p over a partition, accumulated left to right.
double partition_power_sum(const CadlagPath& path, std::span<const std::size_t> partition, double p);

/// |a - b|^p with the exact rounding used by the optimiser.
double increment_power(std::span<const double> a, std::span<const double> b, double p);

struct SawParams {
    int n = 1;
    double T = 1.0;
    Point v;
};

/// t -> (n t / T - k) v on [kT/n, (k+1)T/n), with a jump of -v at every kT/n,
/// k = 1..n (including the horizon T, where the value returns to 0).
CadlagPath make_saw(const SawParams& params);

/// Exact 1-variation of t a + sum_{s<=t} dphi_s on [0, T].
double one_variation_decomposed(const Point& drift, const std::vector<Jump>& jumps, double T);

/// Polygonal interpolation of a continuous path at the times kT/n.
CadlagPath polygonal_approx(const CadlagPath& path, int n, double T);

/// sum_{k=1..n_max} 2^{-k} (1 ^ |||path|||_{[0,k],p}); truncation error <= 2^{-n_max}.
double pvar_norm(const CadlagPath& path, double p, int n_max);

/// Piecewise-linear strictly increasing map with lambda(0) = 0, continued
/// with slope 1 after the last breakpoint.
class ChangeOfTime {
public:
    ChangeOfTime();
    /// breakpoints (s_i, lambda(s_i)); (0, 0) is prepended if absent.
    explicit ChangeOfTime(std::vector<std::pair<double, double>> breakpoints);

    static ChangeOfTime identity() { return ChangeOfTime(); }

    double operator()(double s) const;
    double inverse(double t) const;
    /// sup_{s<t} |log((lambda_t - lambda_s)/(t - s))|, i.e. the largest |log slope|.
    double log_slope_sup() const;
    const std::vector<std::pair<double, double>>& breakpoints() const { return bp_; }

private:
    std::vector<std::pair<double, double>> bp_;
};

/// Value of sup|log slope| + |||k_n f(lambda .) - k_n g(.)|||_{n+1,p} for the
/// given change of time; an upper bound for the p-Skorohod distance d_p^n.
double skorohod_upper(const CadlagPath& f, const CadlagPath& g, double p, int n, const ChangeOfTime& lam);

struct SkorohodSearch {
    double value = 0.0;
    ChangeOfTime lambda;
    const char* family = "identity";
};

/// Best of the identity, the direct jump-aligning interpolation, and the
/// jump-aligning map with right derivatives in {1/2, 1, 2}. Jumps of g
/// before n+1 are matched in order to jumps of f; unmatched counts fall back
/// to the identity.
SkorohodSearch skorohod_search(const CadlagPath& f, const CadlagPath& g, double p, int n);

/// Map with right derivatives in {1/2, 1, 2} sending each from[i] to to[i];
/// intervals whose average slope leaves [1/2, 2] use that average slope.
ChangeOfTime jump_aligned_change(const std::vector<double>& from, const std::vector<double>& to);

/// Step function equal to values[i] on [iT/n, (i+1)T/n), values.size() == n + 1.
CadlagPath make_step(const std::vector<Point>& values, double T);

/// n * max_{i,j} |v_i - v_j|^p, an upper bound for the step function's p-variation^p.
double step_bound(const std::vector<Point>& values, int n, double T, double p);

/// sup of sum |increments|^p over partitions whose consecutive gaps are at
/// most `mesh`. Continuous paths only. Segments are refined on the global grid
/// of spacing mesh / refine so that partitions of gap exactly `mesh` exist.
double regularity_modulus(const CadlagPath& path, double p, double mesh, int refine = 4);

}  // namespace pvarlevy
