#pragma once

#include "nambu/reduce.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nambu {

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    static const GaussLegendre& order(int n);
};

/// Tensor-product Gauss-Legendre integral of f over a box. Nodes are flattened
/// into a single index space so the deterministic block reduction applies.
template <class F>
double tensor_quadrature(std::span<const std::pair<double, double>> bounds,
                         int points_per_axis, F&& f, ExecutionPolicy policy) {
    const int d = (int)bounds.size();
    if (d == 0) throw std::invalid_argument("tensor_quadrature: empty domain");
    if (points_per_axis < 2) throw std::invalid_argument("tensor_quadrature: need >= 2 points");
    const auto& gl = GaussLegendre::order(points_per_axis);

    std::int64_t total = 1;
    for (int j = 0; j < d; ++j) total *= points_per_axis;

    std::vector<double> mid(d), half(d);
    for (int j = 0; j < d; ++j) {
        mid[j] = 0.5 * (bounds[j].first + bounds[j].second);
        half[j] = 0.5 * (bounds[j].second - bounds[j].first);
    }

    const double value = indexed_sum(
        total,
        [&](std::int64_t flat) {
            static thread_local std::vector<double> x;
            x.resize(d);
            double w = 1.0;
            for (int j = 0; j < d; ++j) {
                const int idx = (int)(flat % points_per_axis);
                flat /= points_per_axis;
                x[j] = mid[j] + half[j] * gl.nodes[idx];
                w *= gl.weights[idx] * half[j];
            }
            return w * f(std::span<const double>(x));
        },
        policy);
    return value;
}

/// Cumulative one-dimensional integral F(t) = integral_{a}^{t} f(s) ds over a
/// fixed grid, queried through cubic Hermite interpolation (the integrand
/// supplies the exact derivative at the nodes).
class CumulativeIntegral {
public:
    template <class F>
    CumulativeIntegral(double a, double b, int cells, F&& f) : a_(a), b_(b) {
        if (cells < 1) throw std::invalid_argument("CumulativeIntegral: need >= 1 cell");
        const int gl_order = 7;
        const auto& gl = GaussLegendre::order(gl_order);
        const double h = (b - a) / cells;
        nodes_.resize(cells + 1);
        values_.resize(cells + 1);
        slopes_.resize(cells + 1);
        nodes_[0] = a;
        values_[0] = 0.0;
        slopes_[0] = checked(f(a));
        for (int c = 0; c < cells; ++c) {
            const double lo = a + c * h, hi = lo + h;
            double acc = 0.0;
            for (int i = 0; i < gl_order; ++i)
                acc += gl.weights[i] * checked(f(0.5 * (lo + hi) + 0.5 * h * gl.nodes[i]));
            acc *= 0.5 * h;
            nodes_[c + 1] = hi;
            values_[c + 1] = values_[c] + acc;
            slopes_[c + 1] = checked(f(hi));
        }
    }

    double lo() const { return a_; }
    double hi() const { return b_; }

    double operator()(double t) const;

private:
    static double checked(double v) {
        if (!std::isfinite(v)) throw std::runtime_error("singular integrand on path");
        return v;
    }

    double a_, b_;
    std::vector<double> nodes_, values_, slopes_;
};

} // namespace nambu
