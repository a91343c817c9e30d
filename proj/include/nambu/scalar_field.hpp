#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nambu {

/// A real-valued function on an `dim`-dimensional point, optionally carrying
/// an exact gradient. Evaluation must be deterministic; fields with exact
/// gradients are the precision path throughout the library.
struct ScalarField {
    int dim = 0;
    std::function<double(std::span<const double>)> eval;
    std::function<void(std::span<const double>, std::span<double>)> grad;

    bool has_grad() const { return static_cast<bool>(grad); }

    double operator()(std::span<const double> x) const { return eval(x); }
};

// =============================================================================
// Field constructors
// =============================================================================

template <class F>
ScalarField make_field(int dim, F&& f) {
    ScalarField field;
    field.dim = dim;
    field.eval = std::forward<F>(f);
    return field;
}

template <class F, class G>
ScalarField make_field(int dim, F&& f, G&& g) {
    ScalarField field;
    field.dim = dim;
    field.eval = std::forward<F>(f);
    field.grad = std::forward<G>(g);
    return field;
}

/// The projection x -> x[index].
ScalarField coordinate_field(int dim, int index);

/// The constant function.
ScalarField constant_field(int dim, double value);

// =============================================================================
// Combinators (all preserve exact gradients when both operands carry them)
// =============================================================================

ScalarField field_sum(const ScalarField& a, const ScalarField& b);
ScalarField field_difference(const ScalarField& a, const ScalarField& b);
ScalarField field_product(const ScalarField& a, const ScalarField& b);
ScalarField field_scaled(const ScalarField& a, double c);

/// outer(inner_1(x), ..., inner_m(x)) with chain-rule gradient.
ScalarField field_compose(const ScalarField& outer, std::vector<ScalarField> inner);

/// Extend a field on the first `outer.dim` coordinates to `dim` coordinates,
/// ignoring the trailing ones.
ScalarField field_extend(const ScalarField& inner, int dim);

} // namespace nambu
