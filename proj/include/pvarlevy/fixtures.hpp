#pragma once

#include <cstddef>

#include "pvarlevy/levy.hpp"

// Reference models used by the tests, the acceptance suite and `selftest`.
namespace pvarlevy::fixtures {

/// Stable component with `directions` equally spaced unit vectors in the
/// (e1, e2) plane (d >= 2) or +-e1 (d = 1), total weight `weight`. Zero drift.
LevyModel symmetric_stable(std::size_t d, double beta, double weight, int directions = 8);

/// d = 1, nu(dz) = weight z^{-1-beta} dz on (0, 1], drift alpha.
LevyModel one_sided_stable(double beta, double weight, double alpha);

/// Finite-activity model with K = R^d.
LevyModel atoms_only(const Point& alpha, std::vector<Atom> atoms);

/// Power wedge density on R^2 with K = span{e1}, L = span{e2}.
LevyModel power_wedge(double q, double r, double floor, int bins, int sub_bins, bool one_sided = false);

/// R^3: a one-sided 1/2-stable component along e1 with int z1 nu = 1 + pi/2 and
/// a symmetric 3/2-stable component on +-e2, +-e3; drift (alpha1, 0, 0).
LevyModel mixed_cone(double alpha1);

}  // namespace pvarlevy::fixtures
