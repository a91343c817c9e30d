#pragma once

#include "nambu/layout.hpp"
#include "nambu/scalar_field.hpp"

#include <span>
#include <vector>

namespace nambu {

// =============================================================================
// Gradients
// =============================================================================

/// Default relative step for second-order central differences,
/// cbrt(machine epsilon).
double fd_default_scale();

/// Central finite differences with per-coordinate step
/// h_j = scale * max(1, |x_j|). Throws on a non-finite stencil value,
/// naming the offending coordinate.
std::vector<double> fd_gradient(const ScalarField& f, std::span<const double> x,
                                double scale = fd_default_scale());

/// Exact gradient when the field carries one, central differences otherwise.
std::vector<double> gradient(const ScalarField& f, std::span<const double> x);
std::vector<double> gradient(const ScalarField& f, const Point& at);

/// Allocation-free variant for hot loops; `out` must have f.dim entries.
void gradient_into(const ScalarField& f, std::span<const double> x,
                   std::span<double> out);

// =============================================================================
// Jacobian determinant kernel
// =============================================================================

/// Determinant by row reduction with partial pivoting. `m` is row-major n x n
/// and is consumed (the span overload works in place).
double lu_determinant(std::span<double> m, int n);
double lu_determinant(std::vector<double> m, int n);

/// Rows are field gradients, columns the selected coordinate axes:
/// M[a][b] = d fields[a] / d x[axes[b]].
std::vector<double> jacobian_matrix(std::span<const ScalarField> fields,
                                    std::span<const double> x,
                                    std::span<const int> axes);

/// det d(fields_1..k)/d(x_{axes_1..k}). Throws "empty Jacobian" for k = 0 and
/// on duplicate or out-of-range axes.
double jacobian_determinant(std::span<const ScalarField> fields,
                            std::span<const double> x,
                            std::span<const int> axes);
double jacobian_determinant(std::span<const ScalarField> fields, const Point& at,
                            std::span<const int> axes);

/// Sign of the permutation given as an index list (0 on repeats).
int permutation_sign(std::span<const int> indices);

} // namespace nambu
