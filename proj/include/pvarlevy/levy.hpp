#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pvarlevy/path.hpp"
#include "pvarlevy/point.hpp"

namespace pvarlevy {

using Rng = std::mt19937_64;

/// Independent stream for task `index` of a run seeded with `seed`.
Rng make_stream(std::uint64_t seed, std::uint64_t index);

struct Atom {
    Point point;
    double rate = 0.0;
};

struct SphereAtom {
    Point direction;  // unit vector
    double weight = 0.0;
};

/// nu(B) = sum_xi weight_xi * int_0^inf 1_B(r xi) r^{-1-beta} dr, restricted to
/// r <= 1 unless big_jumps is set.
struct StableComponent {
    double beta = 1.0;
    std::vector<SphereAtom> sphere;
    bool big_jumps = false;
};

/// nu(dz) = 1{0 < z1 < |z2|^r < c_r} |z2|^{-2-q} dz on R^2, with 1 < (1+q)/2 < r < q < r+1
/// and c_r the positive root of x^2 + x^{2/r} = 1 (one_sided keeps z2 > 0).
/// Sampled through an atom grid over floor <= |z2|; the analytic facts
/// (subspaces, compensator, cones) are used for everything else.
struct PowerWedgeDensity {
    double q = 3.0;
    double r = 2.2;
    bool one_sided = false;
    double floor = 1e-3;
    int bins = 200;
    int sub_bins = 4;

    double c_r() const;
    /// Largest |z2| in the support, c_r^{1/r}.
    double z2_max() const;
    /// Closed form 1/(2r - q - 1) quoted for the K-compensator of this measure.
    double c_nominal() const;
    /// int z1 nu(dz) over the full support (exact).
    double z1_integral() const;
    /// Upper bound of int_{|z2| < floor} |z|^p nu(dz).
    double dropped_p_moment(double p) const;
    std::vector<Atom> discretize() const;
};

struct LevyModel {
    std::size_t dim = 1;
    Point alpha;
    std::vector<Atom> atoms;
    std::vector<StableComponent> stable;
    std::optional<PowerWedgeDensity> wedge;
    std::vector<Atom> wedge_atoms;  // discretisation of `wedge`
    Subspace K;
    Subspace L;
    std::optional<double> p_moment_budget;
};

/// Throws ValidationError when the declared K/L split is inconsistent with
/// the analytic 1-variation of each component, or when any field is malformed.
void validate(const LevyModel& model);

/// Fills in the derived fields (wedge atoms) and validates.
LevyModel finalize(LevyModel model);

/// int_{|z|<=1} |z|^p nu(dz); throws ValidationError if infinite. Stores the
/// value in model.p_moment_budget.
double check_pvariation(LevyModel& model, double p);

/// int_{|z|<=1} z_K nu(dz).
Point k_compensator(const LevyModel& model);
/// alpha - int_{|z|<=1} z_K nu(dz).
Point generalized_drift(const LevyModel& model);
/// Same measure, drift alpha - alpha_nu.
LevyModel decompensate(const LevyModel& model);

/// int_{eta <= |z| <= 1} z nu(dz) for the jumps retained at truncation eta.
Point retained_compensator(const LevyModel& model, double eta);
/// Drift of the truncated process between jumps: alpha - retained_compensator.
Point truncated_drift(const LevyModel& model, double eta);
/// Total intensity of jumps with |z| >= eta.
double retained_rate(const LevyModel& model, double eta);
/// int_{|z|<eta} |z|^p nu(dz), the p-moment dropped by truncation (infinite
/// when p <= beta for some stable component).
double small_jump_p_moment(const LevyModel& model, double eta, double p);
/// Mass and first moment of nu on the closed ball of radius `radius` around x.
struct BallMoments {
    double mass = 0.0;
    Point first;
};
BallMoments ball_moments(const LevyModel& model, const Point& x, double radius);
/// A jump size drawn from nu restricted to that ball.
Point sample_in_ball(const LevyModel& model, const Point& x, double radius, Rng& rng);

/// Sample of the truncated process Z^eta on [0, T]: compound Poisson jumps of
/// size >= eta plus the compensating drift. Bit-reproducible given the seed.
CadlagPath sample_path(const LevyModel& model, double T, double eta, Rng& rng);
CadlagPath sample_path(const LevyModel& model, double T, double eta, std::uint64_t seed);

/// One draw S with E[exp(-u S)] = exp(-a u^delta), by Kanter's representation
///   S = a^{1/delta} * sin(delta U) / sin(U)^{1/delta} * (sin((1-delta) U) / E)^{(1-delta)/delta}
/// with U ~ Uniform(0, pi), E ~ Exp(1).
double sample_stable_subordinator(double delta, double a, Rng& rng);

enum class SmallDevCase {
    KFullDriftZero,
    KFullDriftNonzero,
    LFull,
    StrictConeYes,
    OutsideBK,
    Inconclusive,
};
const char* to_string(SmallDevCase c);

struct ConeGeometry {
    /// Rays generating C = intersection over eta of C^eta.
    std::vector<Point> generators;
    /// Rays whose K-projections generate the intersection over eta of the
    /// closures of Pi_K(C^eta).
    std::vector<Point> limit_generators;
    bool strictly_convex = true;
    std::size_t lineality_dim = 0;
};

ConeGeometry cone_geometry(const LevyModel& model);

struct SmallDevVerdict {
    SmallDevCase verdict = SmallDevCase::Inconclusive;
    std::string details;
};

SmallDevVerdict corollary_a_classify(const LevyModel& model, double p);

/// Non-negative least squares min ||G lambda - b|| with lambda >= 0, G given
/// by its columns. Returns the residual norm (Lawson-Hanson active set).
double cone_residual(const std::vector<Point>& generators, const Point& b);

/// JSON model file (schema 1).
LevyModel load_model(const std::string& file);
LevyModel parse_model(const std::string& json_text);

}  // namespace pvarlevy
