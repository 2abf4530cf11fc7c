#include "pvarlevy/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pvarlevy/errors.hpp"

namespace pvarlevy {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr double kUnitTol = 1e-9;
constexpr double kOrthTol = 1e-10;

// int_a^b r^{s} dr for a <= b.
double power_integral(double a, double b, double s) {
    if (b <= a) return 0.0;
    if (std::abs(s + 1.0) < 1e-14) return std::log(b / a);
    return (std::pow(b, s + 1.0) - std::pow(a, s + 1.0)) / (s + 1.0);
}

bool is_infinite_direction(const LevyModel& m, const Point& x) {
    for (const auto& sc : m.stable) {
        if (sc.beta < 1.0) continue;
        for (const auto& sa : sc.sphere)
            if (std::abs(sa.direction.dot(x)) > kOrthTol) return true;
    }
    if (m.wedge && std::abs(x[1]) > kOrthTol) return true;
    return false;
}

// Directions along which the 1-variation of small jumps diverges.
std::vector<Point> infinite_directions(const LevyModel& m) {
    std::vector<Point> out;
    for (const auto& sc : m.stable)
        if (sc.beta >= 1.0)
            for (const auto& sa : sc.sphere) out.push_back(sa.direction);
    if (m.wedge) out.push_back(Point{0.0, 1.0});
    return out;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

// ---------------------------------------------------------------- wedge density

double PowerWedgeDensity::c_r() const {
    // x^2 + x^{2/r} = 1 on (0, 1); the left side is increasing.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid * mid + std::pow(mid, 2.0 / r) < 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double PowerWedgeDensity::z2_max() const { return std::pow(c_r(), 1.0 / r); }

double PowerWedgeDensity::c_nominal() const { return 1.0 / (2.0 * r - q - 1.0); }

double PowerWedgeDensity::z1_integral() const {
    // int_0^a (z^r)^2 / 2 * z^{-2-q} dz per side.
    double side = 0.5 * power_integral(0.0, z2_max(), 2.0 * r - 2.0 - q);
    return one_sided ? side : 2.0 * side;
}

double PowerWedgeDensity::dropped_p_moment(double p) const {
    // |z| <= sqrt(2)|z2| on the support near 0 since z1 < |z2|^r <= |z2|.
    double f = std::min(floor, z2_max());
    double side = std::pow(2.0, p / 2.0) * power_integral(0.0, f, p + r - 2.0 - q);
    return one_sided ? side : 2.0 * side;
}

std::vector<Atom> PowerWedgeDensity::discretize() const {
    if (!(1.0 < (1.0 + q) / 2.0 && (1.0 + q) / 2.0 < r && r < q && q < r + 1.0))
        throw ValidationError("power wedge needs 1 < (1+q)/2 < r < q < r+1");
    if (!(floor > 0.0) || bins < 1 || sub_bins < 1) throw ValidationError("power wedge grid parameters");
    double a = z2_max();
    if (floor >= a) throw ValidationError("power wedge floor above the support");
    std::vector<Atom> atoms;
    double lf = std::log(floor), la = std::log(a);
    for (int b = 0; b < bins; ++b) {
        double lo = std::exp(lf + (la - lf) * b / bins);
        double hi = b + 1 == bins ? a : std::exp(lf + (la - lf) * (b + 1) / bins);
        // z2-marginal of the mass: z^r * z^{-2-q}.
        double mass = power_integral(lo, hi, r - 2.0 - q);
        double mean_z2 = power_integral(lo, hi, r - 1.0 - q) / mass;
        double mean_z2r = power_integral(lo, hi, 2.0 * r - 2.0 - q) / mass;
        for (int s = 0; s < sub_bins; ++s) {
            double u = (s + 0.5) / sub_bins;
            double rate = mass / sub_bins;
            atoms.push_back({Point{u * mean_z2r, mean_z2}, rate});
            if (!one_sided) atoms.push_back({Point{u * mean_z2r, -mean_z2}, rate});
        }
    }
    return atoms;
}

// ---------------------------------------------------------------- validation

void validate(const LevyModel& m) {
    const std::size_t d = m.dim;
    if (d == 0) throw ValidationError("model dimension must be positive");
    if (m.alpha.dim() != d || !m.alpha.is_finite()) throw ValidationError("drift dimension mismatch");
    for (const auto& a : m.atoms) {
        if (a.point.dim() != d || !a.point.is_finite()) throw ValidationError("atom dimension mismatch");
        if (!(a.rate > 0.0) || !std::isfinite(a.rate)) throw ValidationError("atom rate must be positive");
        if (a.point.norm() == 0.0) throw ValidationError("atom at the origin");
    }
    for (const auto& sc : m.stable) {
        if (!(sc.beta > 0.0 && sc.beta < 2.0)) throw ValidationError("stable index must lie in (0,2)");
        if (sc.sphere.empty()) throw ValidationError("stable component without spherical measure");
        for (const auto& sa : sc.sphere) {
            if (sa.direction.dim() != d) throw ValidationError("stable direction dimension mismatch");
            if (std::abs(sa.direction.norm() - 1.0) > kUnitTol) throw ValidationError("stable direction not a unit vector");
            if (!(sa.weight > 0.0) || !std::isfinite(sa.weight)) throw ValidationError("stable weight must be positive");
        }
    }
    if (m.wedge) {
        if (d != 2) throw ValidationError("power wedge density lives in dimension 2");
        m.wedge->discretize();
    }
    if (m.K.ambient_dim() != d || m.L.ambient_dim() != d) throw ValidationError("subspace dimension mismatch");
    if (m.K.rank() + m.L.rank() != d) throw ValidationError("dim K + dim L must equal the dimension");
    for (const auto& x : m.K.basis())
        for (const auto& y : m.L.basis())
            if (std::abs(x.dot(y)) > kOrthTol) throw ValidationError("K and L are not orthogonal");

    // The analytic K is the orthogonal complement of the divergent directions.
    Subspace inf = Subspace::span_of(d, infinite_directions(m));
    for (const auto& x : m.K.basis())
        if (is_infinite_direction(m, x))
            throw ValidationError("declared K contains a direction of infinite 1-variation");
    if (inf.rank() != m.L.rank())
        throw ValidationError("declared L does not match the span of the divergent directions");
    for (const auto& y : m.L.basis())
        if ((inf.project(y) - y).norm() > 1e-8)
            throw ValidationError("declared L contains a direction of finite 1-variation");
}

LevyModel finalize(LevyModel model) {
    model.wedge_atoms = model.wedge ? model.wedge->discretize() : std::vector<Atom>{};
    validate(model);
    return model;
}

double check_pvariation(LevyModel& m, double p) {
    if (!(p >= 1.0 && p < 2.0)) throw ValidationError("p must lie in [1,2)");
    double total = 0.0;
    for (const auto& a : m.atoms) {
        double r = a.point.norm();
        if (r <= 1.0) total += a.rate * std::pow(r, p);
    }
    for (const auto& sc : m.stable) {
        if (p <= sc.beta) {
            std::ostringstream os;
            os << "p = " << p << " <= stable index " << sc.beta << ": infinite p-variation";
            throw ValidationError(os.str());
        }
        double w = 0.0;
        for (const auto& sa : sc.sphere) w += sa.weight;
        total += w / (p - sc.beta);
    }
    if (m.wedge) {
        const auto& wd = *m.wedge;
        if (p <= 1.0 + wd.q - wd.r) throw ValidationError("p <= 1+q-r: infinite p-variation for the power wedge");
        for (const auto& a : m.wedge_atoms) total += a.rate * std::pow(a.point.norm(), p);
        total += wd.dropped_p_moment(p);
    }
    m.p_moment_budget = total;
    return total;
}

Point k_compensator(const LevyModel& m) {
    Point out(m.dim);
    for (const auto& a : m.atoms)
        if (a.point.norm() <= 1.0) out += a.rate * m.K.project(a.point);
    for (const auto& sc : m.stable)
        for (const auto& sa : sc.sphere) {
            Point pk = m.K.project(sa.direction);
            if (pk.norm() <= kOrthTol) continue;
            if (sc.beta >= 1.0) throw ValidationError("compensator diverges along the declared K");
            out += (sa.weight / (1.0 - sc.beta)) * pk;
        }
    if (m.wedge) {
        Point pk = m.K.project(Point{1.0, 0.0});
        out += m.wedge->z1_integral() * pk;
    }
    return out;
}

Point generalized_drift(const LevyModel& m) { return m.alpha - k_compensator(m); }

LevyModel decompensate(const LevyModel& m) {
    LevyModel out = m;
    out.alpha = k_compensator(m);
    return out;
}

Point retained_compensator(const LevyModel& m, double eta) {
    Point out(m.dim);
    auto add_atoms = [&](const std::vector<Atom>& atoms) {
        for (const auto& a : atoms) {
            double r = a.point.norm();
            if (r >= eta && r <= 1.0) out += a.rate * a.point;
        }
    };
    add_atoms(m.atoms);
    add_atoms(m.wedge_atoms);
    for (const auto& sc : m.stable) {
        double I = power_integral(std::min(eta, 1.0), 1.0, -sc.beta);
        for (const auto& sa : sc.sphere) out += (sa.weight * I) * sa.direction;
    }
    return out;
}

Point truncated_drift(const LevyModel& m, double eta) { return m.alpha - retained_compensator(m, eta); }

double retained_rate(const LevyModel& m, double eta) {
    double total = 0.0;
    for (const auto* atoms : {&m.atoms, &m.wedge_atoms})
        for (const auto& a : *atoms)
            if (a.point.norm() >= eta) total += a.rate;
    for (const auto& sc : m.stable) {
        double w = 0.0;
        for (const auto& sa : sc.sphere) w += sa.weight;
        if (eta < 1.0) total += w * (std::pow(eta, -sc.beta) - 1.0) / sc.beta;
        if (sc.big_jumps) total += w * std::pow(std::max(eta, 1.0), -sc.beta) / sc.beta;
    }
    return total;
}

double small_jump_p_moment(const LevyModel& m, double eta, double p) {
    double total = 0.0;
    for (const auto* atoms : {&m.atoms, &m.wedge_atoms})
        for (const auto& a : *atoms) {
            double r = a.point.norm();
            if (r < eta) total += a.rate * std::pow(r, p);
        }
    for (const auto& sc : m.stable) {
        if (p <= sc.beta) return HUGE_VAL;
        double w = 0.0;
        for (const auto& sa : sc.sphere) w += sa.weight;
        double top = sc.big_jumps ? eta : std::min(eta, 1.0);
        total += w * std::pow(top, p - sc.beta) / (p - sc.beta);
    }
    if (m.wedge) total += m.wedge->dropped_p_moment(p);
    return total;
}

// ---------------------------------------------------------------- sampling

namespace {

struct Source {
    enum Kind { AtomJump, Ray } kind;
    Point point;  // atom location or ray direction
    double beta = 0.0;
    double rmin = 0.0, rmax = 0.0;  // rmax = inf for the tail
};

struct SourceTable {
    std::vector<Source> sources;
    std::vector<double> cumulative;
};

SourceTable build_sources(const LevyModel& m, double eta) {
    SourceTable tab;
    double acc = 0.0;
    auto push = [&](Source s, double rate) {
        if (!(rate > 0.0)) return;
        acc += rate;
        tab.sources.push_back(std::move(s));
        tab.cumulative.push_back(acc);
    };
    for (const auto* atoms : {&m.atoms, &m.wedge_atoms})
        for (const auto& a : *atoms)
            if (a.point.norm() >= eta) push({Source::AtomJump, a.point}, a.rate);
    for (const auto& sc : m.stable)
        for (const auto& sa : sc.sphere) {
            if (eta < 1.0)
                push({Source::Ray, sa.direction, sc.beta, eta, 1.0},
                     sa.weight * (std::pow(eta, -sc.beta) - 1.0) / sc.beta);
            if (sc.big_jumps) {
                double lo = std::max(eta, 1.0);
                push({Source::Ray, sa.direction, sc.beta, lo, HUGE_VAL}, sa.weight * std::pow(lo, -sc.beta) / sc.beta);
            }
        }
    return tab;
}

// Radius with density proportional to r^{-1-beta} on [a, b] (b may be infinite).
double sample_radius(double beta, double a, double b, double u) {
    double ia = std::pow(a, -beta);
    double ib = std::isinf(b) ? 0.0 : std::pow(b, -beta);
    return std::pow(ia - u * (ia - ib), -1.0 / beta);
}

Point draw_jump(const SourceTable& tab, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng) * tab.cumulative.back();
    auto it = std::upper_bound(tab.cumulative.begin(), tab.cumulative.end(), u);
    std::size_t k = std::min<std::size_t>(it - tab.cumulative.begin(), tab.sources.size() - 1);
    const Source& s = tab.sources[k];
    if (s.kind == Source::AtomJump) return s.point;
    return sample_radius(s.beta, s.rmin, s.rmax, unif(rng)) * s.point;
}

}  // namespace

CadlagPath sample_path(const LevyModel& m, double T, double eta, Rng& rng) {
    if (!(eta > 0.0)) throw ValidationError("truncation eta must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("horizon T must be positive");
    const SourceTable tab = build_sources(m, eta);
    const Point slope = truncated_drift(m, eta);
    const double rate = tab.cumulative.empty() ? 0.0 : tab.cumulative.back();

    std::vector<double> times;
    if (rate > 0.0) {
        std::poisson_distribution<long long> pois(rate * T);
        long long n = pois(rng);
        std::uniform_real_distribution<double> ut(0.0, T);
        times.reserve(n);
        for (long long i = 0; i < n; ++i) {
            double t;
            do t = ut(rng);
            while (t <= 0.0);
            times.push_back(t);
        }
        std::sort(times.begin(), times.end());
        // bit-equal times are redrawn so the jump count stays Poisson
        for (;;) {
            auto dup = std::adjacent_find(times.begin(), times.end());
            if (dup == times.end()) break;
            double t;
            do t = ut(rng);
            while (t <= 0.0);
            *dup = t;
            std::sort(times.begin(), times.end());
        }
    }

    PathBuilder b(m.dim);
    Point x(m.dim);
    double last = 0.0;
    b.add(0.0, x);
    for (double t : times) {
        Point pre = x + (t - last) * slope;
        Point post = pre + draw_jump(tab, rng);
        b.add_jump(t, pre, post);
        x = std::move(post);
        last = t;
    }
    if (last < T) b.add(T, x + (T - last) * slope);
    return std::move(b).build();
}

CadlagPath sample_path(const LevyModel& m, double T, double eta, std::uint64_t seed) {
    Rng rng = make_stream(seed, 0);
    return sample_path(m, T, eta, rng);
}

double sample_stable_subordinator(double delta, double a, Rng& rng) {
    if (!(delta > 0.0 && delta < 1.0) || !(a > 0.0)) throw ValidationError("subordinator needs delta in (0,1), a > 0");
    const double pi = std::acos(-1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    double U;
    do U = pi * unif(rng);
    while (U <= 0.0);
    double E = expo(rng);
    double s = std::sin(delta * U) / std::pow(std::sin(U), 1.0 / delta) *
               std::pow(std::sin((1.0 - delta) * U) / E, (1.0 - delta) / delta);
    return std::pow(a, 1.0 / delta) * s;
}

// ---------------------------------------------------------------- balls

namespace {

struct BallPiece {
    const Point* atom = nullptr;  // atom piece when set
    const Point* direction = nullptr;
    double beta = 0.0, r1 = 0.0, r2 = 0.0;
    double mass = 0.0;
};

std::vector<BallPiece> ball_pieces(const LevyModel& m, const Point& x, double radius) {
    std::vector<BallPiece> out;
    for (const auto* atoms : {&m.atoms, &m.wedge_atoms})
        for (const auto& a : *atoms)
            if (distance(a.point, x) <= radius) out.push_back({&a.point, nullptr, 0.0, 0.0, 0.0, a.rate});
    for (const auto& sc : m.stable)
        for (const auto& sa : sc.sphere) {
            double s = sa.direction.dot(x);
            double disc = s * s - x.squared_norm() + radius * radius;
            if (disc < 0.0) continue;
            double r1 = s - std::sqrt(disc), r2 = s + std::sqrt(disc);
            if (r2 <= 0.0) continue;
            if (r1 <= 0.0) throw NumericalError("ball around the jump target contains the origin");
            if (!sc.big_jumps) r2 = std::min(r2, 1.0);
            if (r2 <= r1) continue;
            double mass = sa.weight * (std::pow(r1, -sc.beta) - std::pow(r2, -sc.beta)) / sc.beta;
            out.push_back({nullptr, &sa.direction, sc.beta, r1, r2, mass});
        }
    return out;
}

}  // namespace

BallMoments ball_moments(const LevyModel& m, const Point& x, double radius) {
    BallMoments out{0.0, Point(m.dim)};
    for (const auto& pc : ball_pieces(m, x, radius)) {
        out.mass += pc.mass;
        if (pc.atom) {
            out.first += pc.mass * *pc.atom;
        } else {
            double w = pc.mass * pc.beta / (std::pow(pc.r1, -pc.beta) - std::pow(pc.r2, -pc.beta));
            out.first += (w * power_integral(pc.r1, pc.r2, -pc.beta)) * *pc.direction;
        }
    }
    return out;
}

Point sample_in_ball(const LevyModel& m, const Point& x, double radius, Rng& rng) {
    auto pieces = ball_pieces(m, x, radius);
    double total = 0.0;
    for (const auto& pc : pieces) total += pc.mass;
    if (!(total > 0.0)) throw NumericalError("no Levy mass in the ball");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng) * total;
    std::size_t k = 0;
    for (; k + 1 < pieces.size(); ++k) {
        if (u < pieces[k].mass) break;
        u -= pieces[k].mass;
    }
    const auto& pc = pieces[k];
    if (pc.atom) return *pc.atom;
    return sample_radius(pc.beta, pc.r1, pc.r2, unif(rng)) * *pc.direction;
}

// ---------------------------------------------------------------- cones

const char* to_string(SmallDevCase c) {
    switch (c) {
        case SmallDevCase::KFullDriftZero: return "K_full_drift_zero";
        case SmallDevCase::KFullDriftNonzero: return "K_full_drift_nonzero";
        case SmallDevCase::LFull: return "L_full";
        case SmallDevCase::StrictConeYes: return "strict_cone_yes";
        case SmallDevCase::OutsideBK: return "outside_BK";
        case SmallDevCase::Inconclusive: return "inconclusive";
    }
    return "?";
}

double cone_residual(const std::vector<Point>& gens, const Point& b) {
    const std::size_t d = b.dim();
    std::vector<Point> cols;
    for (const auto& g : gens)
        if (g.norm() > 0.0) cols.push_back(g);
    const std::size_t n = cols.size();
    if (n == 0) return b.norm();

    // Lawson-Hanson active set; subproblems by normal equations with
    // Gaussian elimination on the (small) passive set.
    std::vector<double> x(n, 0.0);
    std::vector<bool> passive(n, false);
    auto residual = [&](const std::vector<double>& v) {
        Point r = b;
        for (std::size_t j = 0; j < n; ++j) r -= v[j] * cols[j];
        return r;
    };
    auto solve_passive = [&](std::vector<double>& z) {
        std::vector<std::size_t> P;
        for (std::size_t j = 0; j < n; ++j)
            if (passive[j]) P.push_back(j);
        const std::size_t k = P.size();
        std::vector<double> A(k * (k + 1), 0.0);
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c) A[r * (k + 1) + c] = cols[P[r]].dot(cols[P[c]]);
            A[r * (k + 1) + r] += 1e-14;
            A[r * (k + 1) + k] = cols[P[r]].dot(b);
        }
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < k; ++r)
                if (std::abs(A[r * (k + 1) + c]) > std::abs(A[piv * (k + 1) + c])) piv = r;
            for (std::size_t j = 0; j <= k; ++j) std::swap(A[c * (k + 1) + j], A[piv * (k + 1) + j]);
            double dg = A[c * (k + 1) + c];
            if (std::abs(dg) < 1e-300) continue;
            for (std::size_t r = 0; r < k; ++r) {
                if (r == c) continue;
                double f = A[r * (k + 1) + c] / dg;
                for (std::size_t j = c; j <= k; ++j) A[r * (k + 1) + j] -= f * A[c * (k + 1) + j];
            }
        }
        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t r = 0; r < k; ++r) {
            double dg = A[r * (k + 1) + r];
            z[P[r]] = std::abs(dg) < 1e-300 ? 0.0 : A[r * (k + 1) + k] / dg;
        }
    };

    const double tol = 1e-13 * std::max(1.0, b.norm());
    std::vector<double> z(n);
    for (std::size_t outer = 0; outer < 3 * n + 10; ++outer) {
        Point r = residual(x);
        std::size_t best = n;
        double wmax = tol;
        for (std::size_t j = 0; j < n; ++j) {
            if (passive[j]) continue;
            double w = cols[j].dot(r);
            if (w > wmax) {
                wmax = w;
                best = j;
            }
        }
        if (best == n) break;
        passive[best] = true;
        for (std::size_t inner = 0; inner < 3 * n + 10; ++inner) {
            solve_passive(z);
            bool feasible = true;
            for (std::size_t j = 0; j < n; ++j)
                if (passive[j] && z[j] <= 0.0) feasible = false;
            if (feasible) break;
            double step = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (passive[j] && z[j] <= 0.0) step = std::min(step, x[j] / (x[j] - z[j]));
            for (std::size_t j = 0; j < n; ++j) {
                x[j] += step * (z[j] - x[j]);
                if (passive[j] && x[j] <= 1e-15) {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) x[j] = passive[j] ? std::max(z[j], 0.0) : 0.0;
    }
    (void)d;
    return residual(x).norm();
}

ConeGeometry cone_geometry(const LevyModel& m) {
    ConeGeometry g;
    for (const auto& sc : m.stable)
        for (const auto& sa : sc.sphere) {
            g.generators.push_back(sa.direction);
            g.limit_generators.push_back(sa.direction);
        }
    if (m.wedge) {
        // Near 0 the support is tangent to the z2 axis and opens towards +z1.
        g.generators.push_back(Point{0.0, 1.0});
        g.limit_generators.push_back(Point{0.0, 1.0});
        g.limit_generators.push_back(Point{1.0, 0.0});
        if (!m.wedge->one_sided) {
            g.generators.push_back(Point{0.0, -1.0});
            g.generators.push_back(Point{1.0, 0.0});
            g.limit_generators.push_back(Point{0.0, -1.0});
        }
    }
    std::vector<Point> lineality;
    for (const auto& x : g.generators)
        if (cone_residual(g.generators, -x) <= 1e-8 * x.norm()) lineality.push_back(x);
    Subspace lin = Subspace::span_of(m.dim, lineality);
    g.lineality_dim = lin.rank();
    bool outside = false;
    for (const auto& x : g.generators)
        if ((lin.project(x) - x).norm() > 1e-8) outside = true;
    g.strictly_convex = !(g.lineality_dim >= 2 || (g.lineality_dim == 1 && outside));
    return g;
}

SmallDevVerdict corollary_a_classify(const LevyModel& m, double p) {
    validate(m);
    SmallDevVerdict v;
    std::ostringstream os;
    const Point an = generalized_drift(m);
    if (m.L.rank() == 0) {
        bool zero = an.norm() <= 1e-10;
        v.verdict = zero ? SmallDevCase::KFullDriftZero : SmallDevCase::KFullDriftNonzero;
        os << "K = R^d, |alpha_nu| = " << an.norm();
        v.details = os.str();
        return v;
    }
    if (m.K.rank() == 0) {
        v.verdict = SmallDevCase::LFull;
        os << "L = R^d; small deviations for p = " << p;
        v.details = os.str();
        return v;
    }
    ConeGeometry g = cone_geometry(m);
    if (g.generators.empty()) os << "no generator persists at every scale, C = {0}; ";
    std::vector<Point> cg, bg;
    for (const auto& x : g.generators) cg.push_back(m.K.project(x));
    for (const auto& x : g.limit_generators) bg.push_back(m.K.project(x));
    // alpha in Pi_K^{-1}(A_K) iff -Pi_K alpha_nu lies in Pi_K(C).
    const Point b = -m.K.project(an);
    const double scale = std::max(1.0, b.norm());
    const double ra = cone_residual(cg, b) / scale;
    const double rb = cone_residual(bg, b) / scale;
    os << "residual to A_K " << ra << ", to B_K " << rb << ", lineality dim " << g.lineality_dim
       << (g.strictly_convex ? ", C strictly convex" : ", C contains a half-plane");
    if (ra <= 1e-8 && g.strictly_convex)
        v.verdict = SmallDevCase::StrictConeYes;
    else if (rb > 1e-6)
        v.verdict = SmallDevCase::OutsideBK;
    else
        v.verdict = SmallDevCase::Inconclusive;
    v.details = os.str();
    return v;
}

}  // namespace pvarlevy
