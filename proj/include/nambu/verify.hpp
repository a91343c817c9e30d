#pragma once

#include "nambu/reduce.hpp"
#include "nambu/systems.hpp"

#include <span>
#include <vector>

namespace nambu {

// =============================================================================
// Induced-constraint verification
// =============================================================================

/// Max over chart points, subsystems k, and pairs i1 < i2 of
/// | (1/(N-2)!) sum eps d(G_1..G_{N-2})/d(x_i3..x_iN) - {x_i1, x_i2}_PB |,
/// the constraint-field derivatives taken along the embedded surface.
double verify_induced_constraints(const VariableMap& map,
                                  std::span<const ScalarField> constraints,
                                  std::span<const std::vector<double>> chart_points,
                                  ExecutionPolicy policy = ExecutionPolicy::parallel);

/// Same check at multiplet-space points, resolved through the inverse hint.
/// Throws "constraint check needs inverse or embedding" without one.
double verify_induced_constraints_at_image(
    const VariableMap& map, std::span<const ScalarField> constraints,
    std::span<const std::vector<double>> image_points,
    ExecutionPolicy policy = ExecutionPolicy::parallel);

/// Max over points and probes of |{G o map, u}_PB| on the chart.
double verify_constraint_constancy(const ScalarField& constraint,
                                   std::span<const ScalarField> probes,
                                   const VariableMap& map,
                                   std::span<const std::vector<double>> chart_points,
                                   ExecutionPolicy policy = ExecutionPolicy::parallel);

// =============================================================================
// Generalized-system conditions
// =============================================================================

struct GeneralizedResiduals {
    double xx = 0.0; // (x_a, x_b) family
    double xz = 0.0; // (x_a, z_s) family
    double zz = 0.0; // (z_s, z_t) family

    double max() const { return std::max(xx, std::max(xz, zz)); }
};

/// Residuals of the three relation families between chart Poisson brackets and
/// the metric-weighted constraint minors. Throws "degenerate z-block" when the
/// solved-block Jacobian is singular at a sample point.
GeneralizedResiduals verify_generalized_conditions(
    const GeneralizedNambuSystem& gsys, const VariableMap& map,
    std::span<const std::vector<double>> chart_points,
    ExecutionPolicy policy = ExecutionPolicy::parallel);

/// The metric a block must carry for the (x,x) family to hold:
/// g_ab = {x_a, x_b}_PB / (2 det d(G)/d(z)), evaluated through the chart.
std::vector<double> metric_from_conditions(const GeneralizedNambuSystem& gsys,
                                           const VariableMap& map, int block_index,
                                           std::span<const double> chart_point);

// =============================================================================
// Metric transformation
// =============================================================================

using MetricField = std::function<void(std::span<const double>, std::span<double>)>;

/// g'_ab = sum_cd (dx'_a/dx_c)(dx'_b/dx_d) g_cd at the point (matrix size =
/// number of change components). Throws "non-invertible change of variables"
/// on a singular change-map Jacobian.
std::vector<double> metric_pullback(const MetricField& g,
                                    std::span<const ScalarField> change_map,
                                    std::span<const double> x);

} // namespace nambu
