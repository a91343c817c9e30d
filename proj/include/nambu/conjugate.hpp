#pragma once

#include "nambu/systems.hpp"
#include "nambu/verify.hpp"

#include <span>
#include <utility>
#include <vector>

namespace nambu {

struct QuadraturePath {
    int coordinate = 0;  // which input coordinate the integral runs along
    double origin = 0.0; // lower endpoint
    double lo = -16.0;   // cached grid range; queries must fall inside
    double hi = 16.0;
    int cells = 512;
};

/// X(u) = integral_{origin}^{u[coordinate]} f(u with coordinate := s) ds.
/// One cumulative Gauss-Legendre table per transverse tuple, cubic Hermite
/// interpolation between its nodes. Throws "singular integrand on path" on a
/// non-finite integrand sample.
ScalarField conjugate_coordinate(const ScalarField& integrand, QuadraturePath path);

/// Conjugate coordinates X_alpha built from the gauge-fixed construction:
/// integrand_alpha = 2 g_{entry} det d(G_1..G_m)/d(z_1..z_m) composed through
/// the chart. An empty metric uses the canonical weight 1/2 (unit integrand
/// factor). Returns one chart-space field per alpha.
std::vector<ScalarField> construct_conjugate_coordinates(
    std::span<const ScalarField> constraints, const VariableMap& map,
    std::span<const int> z_indices, std::span<const int> alphas,
    const MetricField& metric, std::span<const std::pair<int, int>> metric_entries,
    QuadraturePath base_path);

} // namespace nambu
