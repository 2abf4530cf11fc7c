// Compiled with -mavx2 (and without FMA contraction); only reached through
// kernel_for() after a runtime CPU check.
#include "pvarlevy/kernels/row_max.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace pvarlevy::kernels {

#if defined(__AVX2__)

namespace {

__m256d horner(const double* c, int n, __m256d x) {
    __m256d acc = _mm256_set1_pd(c[0]);
    for (int i = 1; i < n; ++i) acc = _mm256_add_pd(_mm256_mul_pd(acc, x), _mm256_set1_pd(c[i]));
    return acc;
}

// Lane-wise general_power(x, h); same operation sequence as the scalar version.
__m256d general_power4(__m256d x, double h) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
    const __m256i two52_bits = _mm256_castpd_si256(two52);
    __m256d normal = _mm256_and_pd(_mm256_cmp_pd(x, _mm256_set1_pd(std::numeric_limits<double>::min()), _CMP_GE_OQ),
                                   _mm256_cmp_pd(x, _mm256_set1_pd(std::numeric_limits<double>::max()), _CMP_LE_OQ));
    __m256i bits = _mm256_castpd_si256(x);
    __m256i ebits = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff));
    // small non-negative integer -> double via the 2^52 trick
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(ebits, two52_bits)), two52);
    e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
                                                    _mm256_set1_epi64x(0x3ff0000000000000LL)));
    __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(powc::kSqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    e = _mm256_blendv_pd(e, _mm256_add_pd(e, one), big);
    __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    __m256d z = _mm256_mul_pd(s, s);
    __m256d poly = horner(powc::kLog, 11, z);
    __m256d s2 = _mm256_add_pd(s, s);
    __m256d logm = _mm256_add_pd(s2, _mm256_mul_pd(s2, _mm256_mul_pd(z, poly)));
    __m256d lx = _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(powc::kLn2Hi)),
                               _mm256_add_pd(logm, _mm256_mul_pd(e, _mm256_set1_pd(powc::kLn2Lo))));
    __m256d y = _mm256_mul_pd(_mm256_set1_pd(h), lx);
    __m256d k = _mm256_floor_pd(_mm256_add_pd(_mm256_mul_pd(y, _mm256_set1_pd(powc::kLog2e)), _mm256_set1_pd(0.5)));
    __m256d in_range = _mm256_and_pd(_mm256_cmp_pd(k, _mm256_set1_pd(-1021.0), _CMP_GE_OQ),
                                     _mm256_cmp_pd(k, _mm256_set1_pd(1022.0), _CMP_LE_OQ));
    __m256d ok = _mm256_and_pd(normal, in_range);
    k = _mm256_blendv_pd(_mm256_setzero_pd(), k, ok);
    __m256d r = _mm256_sub_pd(_mm256_sub_pd(y, _mm256_mul_pd(k, _mm256_set1_pd(powc::kLn2Hi))),
                              _mm256_mul_pd(k, _mm256_set1_pd(powc::kLn2Lo)));
    __m256d q = horner(powc::kExp, 14, r);
    // 2^k: biased exponent k + 1023 in [2, 2045], shifted into place
    __m256d kb = _mm256_add_pd(_mm256_add_pd(k, _mm256_set1_pd(1023.0)), two52);
    __m256i kbits = _mm256_slli_epi64(_mm256_sub_epi64(_mm256_castpd_si256(kb), two52_bits), 52);
    __m256d out = _mm256_mul_pd(q, _mm256_castsi256_pd(kbits));
    int okmask = _mm256_movemask_pd(ok);
    if (okmask != 0xf) {
        alignas(32) double xs[4], os[4];
        _mm256_store_pd(xs, x);
        _mm256_store_pd(os, out);
        for (int l = 0; l < 4; ++l)
            if (!(okmask >> l & 1)) os[l] = std::pow(xs[l], h);
        out = _mm256_load_pd(os);
    }
    return out;
}

inline __m256d lane_cost(__m256d sq, CostExponent c) {
    switch (c.mode) {
        case CostMode::Unit: return _mm256_sqrt_pd(sq);
        case CostMode::Square: return sq;
        case CostMode::General: break;
    }
    return general_power4(sq, c.half_p);
}

}  // namespace

Candidate row_max_avx2(const RowInput& in, std::size_t lo, std::size_t hi) {
    Candidate out{-std::numeric_limits<double>::infinity(), kNoIndex};
    std::size_t i = lo;
    if (hi - lo >= 4) {
        __m256d vmax = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
        __m256d vidx = _mm256_set1_pd(-1.0);
        __m256d idx = _mm256_setr_pd(double(lo), double(lo + 1), double(lo + 2), double(lo + 3));
        const __m256d four = _mm256_set1_pd(4.0);
        const Tangent tan = make_tangent(in);
        const __m256d ta = _mm256_set1_pd(tan.a), tb = _mm256_set1_pd(tan.b);
        const __m256d slack = _mm256_set1_pd(kScreenSlack);
        const __m256d thr = _mm256_set1_pd(in.threshold);
        for (; i + 4 <= hi; i += 4) {
            __m256d sq = _mm256_setzero_pd();
            for (std::size_t k = 0; k < in.dim; ++k) {
                __m256d x = _mm256_loadu_pd(in.cols + k * in.stride + i);
                __m256d diff = _mm256_sub_pd(_mm256_set1_pd(in.target[k]), x);
                sq = _mm256_add_pd(sq, _mm256_mul_pd(diff, diff));
            }
            __m256d b = _mm256_loadu_pd(in.best + i);
            if (tan.active) {
                __m256d ub = _mm256_add_pd(b, _mm256_add_pd(ta, _mm256_mul_pd(tb, sq)));
                ub = _mm256_add_pd(ub, _mm256_mul_pd(ub, slack));
                if (_mm256_movemask_pd(_mm256_cmp_pd(ub, thr, _CMP_GE_OQ)) == 0) {
                    idx = _mm256_add_pd(idx, four);
                    continue;
                }
            }
            __m256d cand = _mm256_add_pd(b, lane_cost(sq, in.cost));
            // strict comparison keeps the earliest index per lane
            __m256d better = _mm256_and_pd(_mm256_cmp_pd(cand, vmax, _CMP_GT_OQ), _mm256_cmp_pd(cand, thr, _CMP_GE_OQ));
            vmax = _mm256_blendv_pd(vmax, cand, better);
            vidx = _mm256_blendv_pd(vidx, idx, better);
            idx = _mm256_add_pd(idx, four);
        }
        alignas(32) double m[4], ix[4];
        _mm256_store_pd(m, vmax);
        _mm256_store_pd(ix, vidx);
        for (int l = 0; l < 4; ++l) {
            if (ix[l] < 0.0) continue;
            auto li = static_cast<std::size_t>(ix[l]);
            if (m[l] > out.value || (m[l] == out.value && li < out.index)) out = {m[l], li};
        }
    }
    Candidate tail = row_max_scalar(in, i, hi);
    if (tail.index != kNoIndex && tail.value > out.value) out = tail;
    return out;
}

#else

Candidate row_max_avx2(const RowInput& in, std::size_t lo, std::size_t hi) {
    return row_max_scalar(in, lo, hi);
}

#endif

}  // namespace pvarlevy::kernels
