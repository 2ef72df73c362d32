#pragma once

#include <functional>
#include <vector>

#include "qcr/crgeom.hpp"

namespace qcr::oracle {

/// B(d_i f, d_j f) as ambient vectors, indexed [i][j].
using SecondForm = std::vector<std::vector<Vec>>;

/// Second fundamental form from Richardson-extrapolated second differences
/// at base_step / 2 and base_step / 4. Mixed partials come from polarization
/// along d_i + d_j and d_i - d_j, and the normal projection uses
/// I - J (J^T J)^-1 J^T rather than an orthonormal frame.
SecondForm bruteforce_B(const ChartedSubmanifold& sub, const Vec& u, double base_step = 1e-3);

/// A vector field given by its chart coefficients.
using ChartField = std::function<Vec(const Vec& u)>;

/// Chart coefficients of u -> P(u) J(u) c, the field the distribution jet
/// differentiates.
ChartField distribution_field(const ChartedSubmanifold& sub, const AmbientSpace& space, Distribution which, const Vec& c);

/// Chart coefficients of [X, Z] at u from the flow commutator
/// phi^Z_-h phi^X_-h phi^Z_h phi^X_h (u) - u = h^2 [X, Z] + O(h^3),
/// symmetrized in h and Richardson-extrapolated over h and h / 2. Flows are
/// integrated with RK4. Throws Domain when a flow leaves the chart box.
Vec bruteforce_bracket(const ChartedSubmanifold& sub, const Vec& u, const ChartField& X, const ChartField& Z, double h = 1e-2);

struct Agreement {
  /// max over points and (i, j) of |bruteforce_B - pipeline B|
  double b_deviation = 0.0;
  /// max over points and frame pairs of |flow bracket - jet bracket|
  double bracket_deviation = 0.0;
  int b_points = 0;
  int brackets = 0;
};

/// Compares the oracles with the pipeline at `points` evenly spaced sample
/// points. Brackets are taken for frame pairs of every distribution of rank
/// at least 2, at most `pairs` per distribution and point.
Agreement pipeline_agreement(const ChartedSubmanifold& sub, const AmbientSpace& space, int points = 5, int pairs = 3);

}  // namespace qcr::oracle
