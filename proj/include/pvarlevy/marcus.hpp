#pragma once

#include <string>
#include <vector>

#include "pvarlevy/path.hpp"
#include "pvarlevy/point.hpp"
#include "pvarlevy/pvar.hpp"

namespace pvarlevy {

enum class FieldFamily { Linear, Affine, SmoothBounded };
const char* to_string(FieldFamily f);

/// f : R^m -> R^m (x) R^d from a closed catalog. Column j (the field driven
/// by the j-th input coordinate) is
///   linear:          A_j x
///   affine:          A_j x + b_j
///   smooth_bounded:  "sin_cos": amplitude * (sin or cos)(frequency * x_{(i+j) mod m} + phase_j)
///                    in component i, sin for even j and cos for odd j.
struct VectorFieldSpec {
    FieldFamily family = FieldFamily::Linear;
    std::size_t m = 1;  ///< state dimension
    std::size_t d = 1;  ///< input dimension
    std::vector<std::vector<double>> matrices;  ///< d row-major m x m matrices
    std::vector<Point> offsets;                 ///< d offsets (affine)
    std::string catalog = "sin_cos";
    double amplitude = 1.0;
    double frequency = 1.0;
    std::vector<double> phases;  ///< d phases (smooth_bounded), zero if empty

    static VectorFieldSpec linear(std::size_t m, std::vector<std::vector<double>> matrices);
    static VectorFieldSpec affine(std::size_t m, std::vector<std::vector<double>> matrices, std::vector<Point> offsets);
    static VectorFieldSpec sin_cos(std::size_t m, std::size_t d, double amplitude, double frequency);
    /// f(x) = 0 as a linear field.
    static VectorFieldSpec zero(std::size_t m, std::size_t d);

    /// Throws ValidationError on inconsistent dimensions or catalog ids.
    void validate() const;
    /// f(x) dz.
    Point apply(const Point& x, const Point& dz) const;
    /// sup |f| and sup |Df| for smooth_bounded fields; infinite otherwise.
    double amplitude_bound() const;
    double derivative_bound() const;
    /// Whether the field is bounded with bounded derivatives (smooth_bounded only).
    bool bounded() const { return family == FieldFamily::SmoothBounded; }
};

struct OdeConfig {
    int steps = 256;  ///< RK4 steps per unit of |dz| (at least `steps` per flow)
    bool richardson_check = true;
    double tolerance = 1e-8;  ///< absolute tolerance on the steps vs 2 steps comparison
    int output_substeps = 0;  ///< interior RK4 nodes recorded per drive segment
};

struct MarcusSystem {
    VectorFieldSpec f;
    Point x0;
    OdeConfig ode;
    void validate() const;
};

/// Time-1 flow of y' = f(y) dz from x.
Point marcus_jump_map(const VectorFieldSpec& f, const Point& x, const Point& dz, const OdeConfig& ode = {});

/// g(x, dz) = flow - x - f(x) dz.
Point marcus_correction(const VectorFieldSpec& f, const Point& x, const Point& dz, const OdeConfig& ode = {});

/// Solution of dX = f(X-) <> dZ along a polygonal drive with explicit jumps.
/// Linear segments and jumps are both time-1 flows of f(y) dz, so the output
/// has a node at every drive node (jumps stay pre/post pairs).
CadlagPath solve_marcus(const MarcusSystem& system, const CadlagPath& drive);

struct SupportCurveSpec {
    CadlagPath phi_L;  ///< continuous polygonal path starting at time 0
    Point alpha_nu;
    std::vector<Jump> jumps;  ///< strictly increasing times in (0, T]
};

/// The driving path t -> phi_L(t) + t alpha_nu + sum_{t_p <= t} z_p on [0, T].
CadlagPath support_drive(const SupportCurveSpec& spec);

/// Solution psi of the support equation: flows along phi^L between the t_p,
/// x -> x + g_f(x, z_p) at the t_p.
CadlagPath solve_support_ode(const SupportCurveSpec& spec, const VectorFieldSpec& f, const Point& x0,
                             const OdeConfig& ode = {});

struct ProbeResult {
    double ratio = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    bool degenerate = false;
};

/// |||Phi(xA, A) - Phi(xB, B)|||_{T,p} / (|xA - xB| + |||A - B|||_{T,p}).
/// Equal inputs give ratio 0 with the degenerate flag.
ProbeResult continuity_probe(const MarcusSystem& system, const CadlagPath& driveA, const CadlagPath& driveB,
                             const Point& xA, const Point& xB, double T, double p);

struct SupportDistance {
    double value = 0.0;
    const char* family = "identity";
    bool aligned = true;  ///< false when jump counts could not be matched
};

/// Upper bound for d_p^n between a sample solution and a support candidate
/// using the jump-aligned change of time. Both paths must cover [0, n + 1].
SupportDistance support_distance(const CadlagPath& sample, const CadlagPath& candidate, double p, int n);

/// Candidate drive built from a drive's jumps of size >= threshold and a
/// polygonal fit (`pieces` equal segments) of the remainder.
CadlagPath support_candidate_drive(const CadlagPath& drive, double threshold, int pieces);

/// JSON system file (schema 1): field, x0, ode.
MarcusSystem parse_system(const std::string& json_text);
MarcusSystem load_system(const std::string& file);
/// JSON support candidate file (schema 1): T, alpha_nu, phi_L nodes, jumps.
SupportCurveSpec parse_support_spec(const std::string& json_text);
SupportCurveSpec load_support_spec(const std::string& file);

}  // namespace pvarlevy
