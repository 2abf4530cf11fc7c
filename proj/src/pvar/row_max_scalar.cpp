#include "pvarlevy/kernels/row_max.hpp"

namespace pvarlevy::kernels {

Candidate row_max_scalar(const RowInput& in, std::size_t lo, std::size_t hi) {
    Candidate out{-std::numeric_limits<double>::infinity(), kNoIndex};
    const Tangent tan = make_tangent(in);
    for (std::size_t i = lo; i < hi; ++i) {
        double sq = 0.0;
        for (std::size_t k = 0; k < in.dim; ++k) {
            double diff = in.target[k] - in.cols[k * in.stride + i];
            sq = sq + diff * diff;
        }
        if (tan.active) {
            double ub = in.best[i] + (tan.a + tan.b * sq);
            if (ub + ub * kScreenSlack < in.threshold) continue;
        }
        double cand = in.best[i] + increment_cost(sq, in.cost);
        if (cand >= in.threshold && cand > out.value) out = {cand, i};
    }
    return out;
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa detect_isa() { return avx2_supported() ? Isa::Avx2 : Isa::Scalar; }

RowKernel kernel_for(Isa isa) {
    if (isa == Isa::Avx2 && avx2_supported()) return row_max_avx2;
    return row_max_scalar;
}

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace pvarlevy::kernels
