#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

// Inner loop of the p-variation dynamic programme:
//
//     max_{lo <= i < hi}  best[i] + |x_target - x_i|^p
//
// with the first (smallest) maximising index, restricted to candidates not
// below a threshold. A scalar reference and an AVX2
// variant are provided; both evaluate every candidate with the same sequence
// of IEEE operations, so their results are bit-identical.

namespace pvarlevy::kernels {

enum class CostMode { Unit, Square, General };

/// |z|^p evaluated from |z|^2: sqrt for p = 1, identity for p = 2, pow otherwise.
struct CostExponent {
    CostMode mode = CostMode::General;
    double half_p = 1.0;
};

inline CostExponent make_cost(double p) {
    if (p == 1.0) return {CostMode::Unit, 0.5};
    if (p == 2.0) return {CostMode::Square, 1.0};
    return {CostMode::General, 0.5 * p};
}

// Coefficients shared by the scalar and vector evaluations of x^h.
namespace powc {
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kLog2e = 1.44269504088896338700;
// 1/3, 1/5, ..., 1/23 for atanh(s)/s - 1 in powers of s^2.
inline constexpr double kLog[11] = {1.0 / 23, 1.0 / 21, 1.0 / 19, 1.0 / 17, 1.0 / 15, 1.0 / 13,
                                    1.0 / 11, 1.0 / 9,  1.0 / 7,  1.0 / 5,  1.0 / 3};
// 1/13!, ..., 1/2!, 1, 1 for exp(r) on |r| <= ln2 / 2.
inline constexpr double kExp[14] = {1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
                                    1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
                                    1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
                                    1.0 / 24.0,         1.0 / 6.0,         1.0 / 2.0,
                                    1.0,                1.0};
}  // namespace powc

/// x^h for x >= 0 as exp(h log x) with fixed polynomials, a few ulp from
/// std::pow. Subnormal, zero, non-finite inputs and results outside the
/// normal range go through std::pow. The AVX2 kernel repeats these steps
/// lane by lane.
inline double general_power(double x, double h) {
    if (!(x >= std::numeric_limits<double>::min()) || !(x <= std::numeric_limits<double>::max()))
        return std::pow(x, h);
    auto bits = std::bit_cast<std::uint64_t>(x);
    double e = double(static_cast<std::int64_t>((bits >> 52) & 0x7ff)) - 1023.0;
    double m = std::bit_cast<double>((bits & 0x000fffffffffffffULL) | 0x3ff0000000000000ULL);
    if (m > powc::kSqrt2) {
        m = m * 0.5;
        e = e + 1.0;
    }
    double s = (m - 1.0) / (m + 1.0);
    double z = s * s;
    double poly = powc::kLog[0];
    for (int i = 1; i < 11; ++i) poly = poly * z + powc::kLog[i];
    double logm = (s + s) + (s + s) * (z * poly);
    double lx = e * powc::kLn2Hi + (logm + e * powc::kLn2Lo);
    double y = h * lx;
    double k = std::floor(y * powc::kLog2e + 0.5);
    if (!(k >= -1021.0 && k <= 1022.0)) return std::pow(x, h);
    double r = (y - k * powc::kLn2Hi) - k * powc::kLn2Lo;
    double q = powc::kExp[0];
    for (int i = 1; i < 14; ++i) q = q * r + powc::kExp[i];
    double scale = std::bit_cast<double>(static_cast<std::uint64_t>(static_cast<std::int64_t>(k) + 1023) << 52);
    return q * scale;
}

inline double increment_cost(double squared, CostExponent c) {
    switch (c.mode) {
        case CostMode::Unit: return std::sqrt(squared);
        case CostMode::Square: return squared;
        case CostMode::General: return general_power(squared, c.half_p);
    }
    return general_power(squared, c.half_p);
}

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct Candidate {
    double value = 0.0;
    std::size_t index = kNoIndex;
};

struct RowInput {
    const double* cols = nullptr;  // column-major node values: cols[k * stride + i]
    std::size_t stride = 0;
    std::size_t dim = 0;
    const double* best = nullptr;  // DP values of the candidate predecessors
    const double* target = nullptr;  // dim coordinates of the node being extended
    CostExponent cost;
    /// Only candidates with value >= threshold are reported.
    double threshold = -std::numeric_limits<double>::infinity();
    /// When positive and the cost is concave (p < 2), an upper bound on every
    /// squared distance in the range; candidates are then screened with the
    /// tangent of sq^{p/2} at that point before the power is evaluated.
    double tangent_sq = 0.0;
};

/// sq^h <= a + b sq for all sq >= 0 when h < 1 (tangent at s0).
struct Tangent {
    bool active = false;
    double a = 0.0, b = 0.0;
};

inline Tangent make_tangent(const RowInput& in) {
    Tangent t;
    if (in.cost.mode != CostMode::General || !(in.cost.half_p < 1.0) ||
        !(in.tangent_sq >= 1e-200) || !(in.threshold > -std::numeric_limits<double>::infinity()))
        return t;
    double h = in.cost.half_p;
    double s0h = std::pow(in.tangent_sq, h);
    t.a = s0h * (1.0 - h);
    t.b = h * s0h / in.tangent_sq;
    t.active = std::isfinite(t.a) && std::isfinite(t.b);
    return t;
}

/// Relative slack on screened bounds (rounding of the tangent and of the power).
inline constexpr double kScreenSlack = 1e-12;

using RowKernel = Candidate (*)(const RowInput&, std::size_t lo, std::size_t hi);

Candidate row_max_scalar(const RowInput& in, std::size_t lo, std::size_t hi);
Candidate row_max_avx2(const RowInput& in, std::size_t lo, std::size_t hi);

enum class Isa { Scalar, Avx2 };

bool avx2_supported();
/// Avx2 when the running CPU supports it, Scalar otherwise.
Isa detect_isa();
RowKernel kernel_for(Isa isa);
const char* to_string(Isa isa);

}  // namespace pvarlevy::kernels
