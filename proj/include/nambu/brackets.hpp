#pragma once

#include "nambu/fields.hpp"
#include "nambu/layout.hpp"

#include <span>
#include <vector>

namespace nambu {

/// Carries the subsystem partition a bracket sums over. Poisson contexts use
/// arity 2, Nambu contexts a uniform arity N >= 2.
struct BracketContext {
    Layout layout;
};

inline BracketContext poisson_context(int subsystems) {
    return BracketContext{doublet_layout(subsystems)};
}
inline BracketContext nambu_context(int subsystems, int arity) {
    return BracketContext{multiplet_layout(subsystems, arity)};
}

// =============================================================================
// Brackets
// =============================================================================

/// sum_k d(A,B)/d(q_k,p_k). Requires an arity-2 layout.
double poisson_bracket(const ScalarField& A, const ScalarField& B,
                       std::span<const double> x, const Layout& layout);
double poisson_bracket(const ScalarField& A, const ScalarField& B, const Point& at,
                       const BracketContext& ctx);

/// sum_k d(A_1,...,A_N)/d(x_1(k),...,x_N(k)) with exactly N = arity fields.
double nambu_bracket(std::span<const ScalarField> fields, std::span<const double> x,
                     const Layout& layout);
double nambu_bracket(std::span<const ScalarField> fields, const Point& at,
                     const BracketContext& ctx);

// =============================================================================
// Jacobian decomposition
// =============================================================================

/// The Laplace-type split of a full Jacobian determinant into
/// (1/(h! t!)) sum eps * head-minor * tail-minor with h = head_count and
/// t = tail_count, evaluated by subset enumeration.
double jacobian_split_sum(std::span<const ScalarField> fields,
                          std::span<const double> x, int head_count, int tail_count);

/// |full determinant - split sum| at the point.
double verify_jacobian_decomposition(std::span<const ScalarField> fields,
                                     std::span<const double> x, int head_count,
                                     int tail_count);
double verify_jacobian_decomposition(std::span<const ScalarField> fields,
                                     const Point& at, int head_count, int tail_count);

/// Signed minor of the stacked gradient matrix of `fields` over the
/// complement of `fixed` axes, weighted by eps(fixed..., sorted complement...).
/// This is the closed form of (1/r!) sum eps * d(fields)/d(x_tail) for a fixed
/// head tuple, used by the induced-constraint and lift conditions.
double epsilon_complement_minor(std::span<const ScalarField> fields,
                                std::span<const double> x, int dim,
                                std::span<const int> fixed);

} // namespace nambu
