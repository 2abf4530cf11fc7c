#include "pvarlevy/pvar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "pvarlevy/errors.hpp"

namespace pvarlevy {

using kernels::Candidate;
using kernels::CostExponent;
using kernels::kNoIndex;

namespace {

constexpr std::size_t kBlock = 64;
constexpr std::size_t kFan = 16;

void check_p(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("p-variation needs p >= 1");
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double diff = a[k] - b[k];
        sq = sq + diff * diff;
    }
    return sq;
}

// Per-block summary used to bound best[i] + |x_j - x_i|^p over a block.
struct BlockStats {
    double best_max = -std::numeric_limits<double>::infinity();
    std::vector<double> lo, hi;
};

}  // namespace

double increment_power(std::span<const double> a, std::span<const double> b, double p) {
    // target - source ordering matches the kernels; squaring makes it symmetric
    return kernels::increment_cost(squared_distance(b, a), kernels::make_cost(p));
}

PVarOutcome pvar_exact_values(std::span<const double> values, std::size_t dim, double p,
                              const PVarOptions& opts) {
    check_p(p);
    if (dim == 0 || values.size() % dim != 0) throw ValidationError("pvar: malformed value array");
    const std::size_t n = values.size() / dim;
    if (n == 0) throw ValidationError("pvar: path has no nodes");

    const CostExponent cost = kernels::make_cost(p);
    const kernels::RowKernel kernel = kernels::kernel_for(opts.isa);

    std::vector<double> cols(n * dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < dim; ++k) cols[k * n + i] = values[i * dim + k];

    std::vector<double> best(n, 0.0);
    std::vector<std::size_t> pred(n, kNoIndex);
    // two levels: blocks of kBlock nodes, superblocks of kFan blocks
    std::vector<BlockStats> blocks((n + kBlock - 1) / kBlock);
    std::vector<BlockStats> supers((blocks.size() + kFan - 1) / kFan);
    for (auto* level : {&blocks, &supers})
        for (auto& b : *level) {
            b.lo.assign(dim, std::numeric_limits<double>::infinity());
            b.hi.assign(dim, -std::numeric_limits<double>::infinity());
        }

    kernels::RowInput in;
    in.cols = cols.data();
    in.stride = n;
    in.dim = dim;
    in.best = best.data();
    in.cost = cost;

    // Upper bound of best[i] + |x_j - x_i|^p over the summary, and the
    // largest squared distance it admits.
    auto bound = [&](const BlockStats& bs, const double* xj, double& sq) {
        sq = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            double d = std::max(xj[k] - bs.lo[k], bs.hi[k] - xj[k]);
            sq = sq + d * d;
        }
        // std::pow and the kernels' power agree to a few ulp; the slack covers it
        double b = bs.best_max + std::pow(sq, cost.half_p);
        return b + b * 1e-12;
    };

    for (std::size_t j = 0; j < n; ++j) {
        const double* xj = values.data() + j * dim;
        in.target = xj;
        Candidate cur{0.0, kNoIndex};
        if (j > 0) {
            const std::size_t last_block = (j - 1) / kBlock;
            for (std::size_t si = last_block / kFan + 1; si-- > 0;) {
                double sq = 0.0;
                if (opts.prune && bound(supers[si], xj, sq) < cur.value) continue;
                const std::size_t first = si * kFan;
                for (std::size_t bi = std::min(first + kFan, last_block + 1); bi-- > first;) {
                    const std::size_t lo = bi * kBlock;
                    const std::size_t hi = std::min(lo + kBlock, j);
                    in.threshold = -std::numeric_limits<double>::infinity();
                    in.tangent_sq = 0.0;
                    if (opts.prune) {
                        if (bound(blocks[bi], xj, sq) < cur.value) continue;
                        in.threshold = cur.value;
                        in.tangent_sq = sq;
                    }
                    Candidate c = kernel(in, lo, hi);
                    if (c.index == kNoIndex) continue;
                    if (c.value > cur.value ||
                        (c.value == cur.value && cur.index != kNoIndex && c.index < cur.index))
                        cur = c;
                }
            }
        }
        best[j] = cur.value;
        pred[j] = cur.index;
        for (BlockStats* bs : {&blocks[j / kBlock], &supers[j / kBlock / kFan]}) {
            bs->best_max = std::max(bs->best_max, cur.value);
            for (std::size_t k = 0; k < dim; ++k) {
                bs->lo[k] = std::min(bs->lo[k], xj[k]);
                bs->hi[k] = std::max(bs->hi[k], xj[k]);
            }
        }
    }

    std::size_t end = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (best[j] > best[end]) end = j;

    PVarOutcome out;
    out.p = p;
    out.power_sum = best[end];
    out.value = std::pow(out.power_sum, 1.0 / p);
    for (std::size_t j = end; j != kNoIndex; j = pred[j]) out.partition.push_back(j);
    std::reverse(out.partition.begin(), out.partition.end());
    return out;
}

PVarOutcome pvar_exact(const CadlagPath& path, double p, const PVarOptions& opts) {
    return pvar_exact_values(path.flat_values(), path.dim(), p, opts);
}

PVarOutcome pvar_bruteforce(const CadlagPath& path, double p) {
    check_p(p);
    const std::size_t n = path.size();
    if (n == 0) throw ValidationError("pvar: path has no nodes");
    if (n > 20) throw ValidationError("pvar_bruteforce: at most 20 nodes");

    std::vector<double> cost(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) cost[i * n + j] = increment_power(path.value(i), path.value(j), p);

    double best = -1.0;
    std::uint32_t best_mask = 1;
    // every nonempty subset is a candidate partition, summed left to right
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        double s = 0.0;
        std::size_t prev = kNoIndex;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask & (1u << i))) continue;
            if (prev != kNoIndex) s = s + cost[prev * n + i];
            prev = i;
        }
        if (s > best) {
            best = s;
            best_mask = mask;
        }
    }
    PVarOutcome out;
    out.p = p;
    out.power_sum = best;
    out.value = std::pow(best, 1.0 / p);
    for (std::size_t i = 0; i < n; ++i)
        if (best_mask & (1u << i)) out.partition.push_back(i);
    return out;
}

double partition_power_sum(const CadlagPath& path, std::span<const std::size_t> partition, double p) {
    double s = 0.0;
    for (std::size_t k = 1; k < partition.size(); ++k)
        s = s + increment_power(path.value(partition[k - 1]), path.value(partition[k]), p);
    return s;
}

CadlagPath make_saw(const SawParams& params) {
    if (params.n < 1) throw ValidationError("saw: n must be >= 1");
    if (!(params.T > 0.0)) throw ValidationError("saw: T must be positive");
    if (params.v.dim() == 0) throw ValidationError("saw: empty slope vector");
    const std::size_t d = params.v.dim();
    PathBuilder b(d);
    b.add(0.0, Point(d));
    for (int k = 1; k <= params.n; ++k) {
        double t = k == params.n ? params.T : (k * params.T) / params.n;
        b.add_jump(t, params.v, Point(d));
    }
    return std::move(b).build();
}

double one_variation_decomposed(const Point& drift, const std::vector<Jump>& jumps, double T) {
    double s = T * drift.norm();
    for (const auto& j : jumps) {
        if (j.time < 0.0 || j.time > T) throw ValidationError("jump time outside [0, T]");
        s += j.size.norm();
    }
    return s;
}

CadlagPath polygonal_approx(const CadlagPath& path, int n, double T) {
    if (n < 1) throw ValidationError("polygonal_approx: n must be >= 1");
    if (path.has_jumps()) throw ValidationError("polygonal_approx: path has jumps");
    PathBuilder b(path.dim());
    for (int k = 0; k <= n; ++k) {
        double t = k == n ? T : (k * T) / n;
        b.add(t, evaluate(path, t));
    }
    return std::move(b).build();
}

double pvar_norm(const CadlagPath& path, double p, int n_max) {
    if (n_max < 1) throw ValidationError("pvar_norm: n_max must be >= 1");
    if (path.start_time() > 0.0 || path.end_time() < n_max)
        throw ValidationError("pvar_norm: path domain does not cover [0, n_max]");
    double s = 0.0;
    for (int k = 1; k <= n_max; ++k) {
        double v = pvar_exact(restrict(path, 0.0, k), p).value;
        s += std::ldexp(std::min(1.0, v), -k);
    }
    return s;
}

ChangeOfTime::ChangeOfTime() : bp_{{0.0, 0.0}} {}

ChangeOfTime::ChangeOfTime(std::vector<std::pair<double, double>> breakpoints) : bp_(std::move(breakpoints)) {
    if (bp_.empty() || bp_.front().first != 0.0) bp_.insert(bp_.begin(), {0.0, 0.0});
    if (bp_.front().second != 0.0) throw ValidationError("change of time must satisfy lambda(0) = 0");
    for (std::size_t i = 1; i < bp_.size(); ++i) {
        double ds = bp_[i].first - bp_[i - 1].first;
        double dt = bp_[i].second - bp_[i - 1].second;
        if (!(ds > 0.0) || !(dt > 0.0) || !std::isfinite(dt / ds))
            throw ValidationError("change of time is not strictly increasing");
    }
}

double ChangeOfTime::operator()(double s) const {
    if (s <= 0.0) return s;
    auto it = std::upper_bound(bp_.begin(), bp_.end(), s, [](double v, const auto& b) { return v < b.first; });
    if (it == bp_.end()) return bp_.back().second + (s - bp_.back().first);
    auto prev = it - 1;
    double w = (s - prev->first) / (it->first - prev->first);
    return prev->second + w * (it->second - prev->second);
}

double ChangeOfTime::inverse(double t) const {
    if (t <= 0.0) return t;
    auto it = std::upper_bound(bp_.begin(), bp_.end(), t, [](double v, const auto& b) { return v < b.second; });
    if (it == bp_.end()) return bp_.back().first + (t - bp_.back().second);
    auto prev = it - 1;
    double w = (t - prev->second) / (it->second - prev->second);
    return prev->first + w * (it->first - prev->first);
}

double ChangeOfTime::log_slope_sup() const {
    // chords average the piece slopes, so the sup is attained on a single piece
    double m = 0.0;
    for (std::size_t i = 1; i < bp_.size(); ++i) {
        double slope = (bp_[i].second - bp_[i - 1].second) / (bp_[i].first - bp_[i - 1].first);
        m = std::max(m, std::abs(std::log(slope)));
    }
    return m;
}

namespace {

double cutoff(double t, int n) {
    if (t <= n) return 1.0;
    if (t <= n + 1) return n + 1 - t;
    return 0.0;
}

}  // namespace

double skorohod_upper(const CadlagPath& f, const CadlagPath& g, double p, int n, const ChangeOfTime& lam) {
    if (f.dim() != g.dim()) throw ValidationError("skorohod: dimension mismatch");
    if (n < 1) throw ValidationError("skorohod: n must be >= 1");
    const double horizon = n + 1;
    if (f.start_time() > 0.0 || g.start_time() > 0.0 || g.end_time() < horizon || f.end_time() < lam(horizon))
        throw ValidationError("skorohod: paths do not cover the horizon under the change of time");

    // Grid in g's clock: g's nodes, preimages of f's nodes, the breakpoints of
    // lambda, and a refinement of (n, n+1] where the cutoff is linear.
    std::vector<double> grid;
    for (double t : g.times())
        if (t <= horizon) grid.push_back(t);
    for (double t : f.times()) {
        double s = lam.inverse(t);
        if (s >= 0.0 && s <= horizon) grid.push_back(s);
    }
    for (const auto& [s, t] : lam.breakpoints())
        if (s <= horizon) grid.push_back(s);
    constexpr int kCutoffRefine = 64;
    for (int i = 0; i <= kCutoffRefine; ++i) grid.push_back(n + static_cast<double>(i) / kCutoffRefine);
    grid.push_back(0.0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    PathBuilder b(f.dim());
    for (double s : grid) {
        double k = cutoff(s, n);
        double t = std::min(lam(s), f.end_time());
        Point value = k * (evaluate(f, t) - evaluate(g, s));
        Point left = k * (left_limit(f, t) - left_limit(g, s));
        if (s > 0.0 && !(left == value))
            b.add_jump(s, left, value);
        else
            b.add(s, value);
    }
    CadlagPath diff = std::move(b).build();
    return lam.log_slope_sup() + pvar_exact(diff, p).value;
}

ChangeOfTime jump_aligned_change(const std::vector<double>& from, const std::vector<double>& to) {
    if (from.size() != to.size()) throw ValidationError("jump_aligned_change: size mismatch");
    std::vector<std::pair<double, double>> bp{{0.0, 0.0}};
    for (std::size_t i = 0; i < from.size(); ++i) {
        auto [s0, t0] = bp.back();
        double ds = from[i] - s0, dt = to[i] - t0;
        if (!(ds > 0.0) || !(dt > 0.0)) throw ValidationError("jump_aligned_change: times not increasing");
        double a = dt / ds;
        if (a > 1.0 && a <= 2.0) {
            double x = dt - ds;  // slope 2 for x, then slope 1
            if (x > 0.0 && x < ds) bp.push_back({s0 + x, t0 + 2.0 * x});
        } else if (a < 1.0 && a >= 0.5) {
            double x = 2.0 * (ds - dt);  // slope 1/2 for x, then slope 1
            if (x > 0.0 && x < ds) bp.push_back({s0 + x, t0 + 0.5 * x});
        }
        bp.push_back({from[i], to[i]});
    }
    return ChangeOfTime(std::move(bp));
}

SkorohodSearch skorohod_search(const CadlagPath& f, const CadlagPath& g, double p, int n) {
    SkorohodSearch out;
    out.lambda = ChangeOfTime::identity();
    out.value = skorohod_upper(f, g, p, n, out.lambda);

    const double horizon = n + 1;
    std::vector<double> fj, gj;
    for (const auto& j : jump_list(f))
        if (j.time > 0.0 && j.time < horizon) fj.push_back(j.time);
    for (const auto& j : jump_list(g))
        if (j.time > 0.0 && j.time < horizon) gj.push_back(j.time);
    if (fj.empty() || fj.size() != gj.size()) return out;

    auto consider = [&](const ChangeOfTime& lam, const char* family) {
        if (lam(horizon) > f.end_time()) return;
        double v = skorohod_upper(f, g, p, n, lam);
        if (v < out.value) {
            out.value = v;
            out.lambda = lam;
            out.family = family;
        }
    };
    std::vector<std::pair<double, double>> direct;
    for (std::size_t i = 0; i < gj.size(); ++i) direct.push_back({gj[i], fj[i]});
    consider(ChangeOfTime(direct), "direct");
    consider(jump_aligned_change(gj, fj), "half-one-two");
    return out;
}

CadlagPath make_step(const std::vector<Point>& values, double T) {
    if (values.size() < 2) throw ValidationError("make_step: need n + 1 >= 2 values");
    if (!(T > 0.0)) throw ValidationError("make_step: T must be positive");
    const int n = static_cast<int>(values.size()) - 1;
    PathBuilder b(values[0].dim());
    b.add(0.0, values[0]);
    for (int i = 1; i <= n; ++i) {
        double t = i == n ? T : (i * T) / n;
        if (values[i] == values[i - 1])
            b.add(t, values[i]);
        else
            b.add_jump(t, values[i - 1], values[i]);
    }
    return std::move(b).build();
}

double step_bound(const std::vector<Point>& values, int n, double T, double p) {
    check_p(p);
    if (static_cast<int>(values.size()) != n + 1) throw ValidationError("step_bound: need n + 1 values");
    if (!(T > 0.0)) throw ValidationError("step_bound: T must be positive");
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            m = std::max(m, increment_power(values[i].coords(), values[j].coords(), p));
    return n * m;
}

double regularity_modulus(const CadlagPath& path, double p, double mesh, int refine) {
    check_p(p);
    if (!(mesh > 0.0)) throw ValidationError("regularity_modulus: mesh must be positive");
    if (refine < 1) throw ValidationError("regularity_modulus: refine must be >= 1");
    if (path.has_jumps()) throw ValidationError("regularity_modulus: path has jumps");

    const double h = mesh / refine;
    std::vector<double> grid(path.times());
    const double t0 = path.start_time(), t1 = path.end_time();
    for (long k = static_cast<long>(std::ceil(t0 / h)); k * h <= t1; ++k) grid.push_back(k * h);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<Point> x;
    x.reserve(grid.size());
    for (double t : grid) x.push_back(evaluate(path, t));

    // the mesh constraint is checked with a relative slack so that gaps that
    // equal `mesh` up to rounding of k*h are admitted
    const double limit = mesh * (1.0 + 1e-12);
    std::vector<double> best(grid.size(), 0.0);
    double out = 0.0;
    std::size_t first = 0;
    for (std::size_t j = 1; j < grid.size(); ++j) {
        while (grid[j] - grid[first] > limit) ++first;
        double b = 0.0;
        for (std::size_t i = first; i < j; ++i)
            b = std::max(b, best[i] + increment_power(x[i].coords(), x[j].coords(), p));
        best[j] = b;
        out = std::max(out, b);
    }
    return out;
}

}  // namespace pvarlevy
