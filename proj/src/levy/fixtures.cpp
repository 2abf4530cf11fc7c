#include "pvarlevy/fixtures.hpp"

#include <cmath>

namespace pvarlevy::fixtures {

LevyModel symmetric_stable(std::size_t d, double beta, double weight, int directions) {
    LevyModel m;
    m.dim = d;
    m.alpha = Point(d);
    StableComponent sc;
    sc.beta = beta;
    if (d == 1) {
        sc.sphere = {{Point{1.0}, weight / 2}, {Point{-1.0}, weight / 2}};
    } else {
        const double pi = std::acos(-1.0);
        for (int k = 0; k < directions; ++k) {
            Point xi(d);
            xi[0] = std::cos(2 * pi * k / directions);
            xi[1] = std::sin(2 * pi * k / directions);
            sc.sphere.push_back({xi, weight / directions});
        }
    }
    m.stable.push_back(sc);
    if (beta >= 1.0 && d <= 2) {
        m.K = Subspace::zero(d);
        m.L = Subspace::full(d);
    } else if (beta >= 1.0) {
        Point e1(d), e2(d);
        e1[0] = 1.0;
        e2[1] = 1.0;
        m.L = Subspace(d, {e1, e2});
        m.K = m.L.orthogonal_complement();
    } else {
        m.K = Subspace::full(d);
        m.L = Subspace::zero(d);
    }
    return finalize(std::move(m));
}

LevyModel one_sided_stable(double beta, double weight, double alpha) {
    LevyModel m;
    m.dim = 1;
    m.alpha = Point{alpha};
    m.stable.push_back({beta, {{Point{1.0}, weight}}, false});
    if (beta < 1.0) {
        m.K = Subspace::full(1);
        m.L = Subspace::zero(1);
    } else {
        m.K = Subspace::zero(1);
        m.L = Subspace::full(1);
    }
    return finalize(std::move(m));
}

LevyModel atoms_only(const Point& alpha, std::vector<Atom> atoms) {
    LevyModel m;
    m.dim = alpha.dim();
    m.alpha = alpha;
    m.atoms = std::move(atoms);
    m.K = Subspace::full(m.dim);
    m.L = Subspace::zero(m.dim);
    return finalize(std::move(m));
}

LevyModel power_wedge(double q, double r, double floor, int bins, int sub_bins, bool one_sided) {
    LevyModel m;
    m.dim = 2;
    m.alpha = Point(2);
    PowerWedgeDensity w;
    w.q = q;
    w.r = r;
    w.floor = floor;
    w.bins = bins;
    w.sub_bins = sub_bins;
    w.one_sided = one_sided;
    m.wedge = w;
    m.K = Subspace(2, {Point{1.0, 0.0}});
    m.L = Subspace(2, {Point{0.0, 1.0}});
    return finalize(std::move(m));
}

LevyModel mixed_cone(double alpha1) {
    const double pi = std::acos(-1.0);
    LevyModel m;
    m.dim = 3;
    m.alpha = Point{alpha1, 0.0, 0.0};
    // int_0^1 z * w z^{-3/2} dz = 2w
    m.stable.push_back({0.5, {{Point{1.0, 0.0, 0.0}, (1.0 + pi / 2.0) / 2.0}}, false});
    m.stable.push_back({1.5,
                        {{Point{0.0, 1.0, 0.0}, 0.25},
                         {Point{0.0, -1.0, 0.0}, 0.25},
                         {Point{0.0, 0.0, 1.0}, 0.25},
                         {Point{0.0, 0.0, -1.0}, 0.25}},
                        false});
    m.K = Subspace(3, {Point{1.0, 0.0, 0.0}});
    m.L = Subspace(3, {Point{0.0, 1.0, 0.0}, Point{0.0, 0.0, 1.0}});
    return finalize(std::move(m));
}

}  // namespace pvarlevy::fixtures
