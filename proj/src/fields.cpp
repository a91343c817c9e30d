#include "nambu/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nambu {

// =============================================================================
// Field constructors and combinators
// =============================================================================

ScalarField coordinate_field(int dim, int index) {
    if (index < 0 || index >= dim)
        throw std::invalid_argument("coordinate_field: index out of range");
    return make_field(
        dim, [index](std::span<const double> x) { return x[index]; },
        [index](std::span<const double>, std::span<double> g) {
            std::fill(g.begin(), g.end(), 0.0);
            g[index] = 1.0;
        });
}

ScalarField constant_field(int dim, double value) {
    return make_field(
        dim, [value](std::span<const double>) { return value; },
        [](std::span<const double>, std::span<double> g) {
            std::fill(g.begin(), g.end(), 0.0);
        });
}

namespace {

void check_same_dim(const ScalarField& a, const ScalarField& b, const char* op) {
    if (a.dim != b.dim)
        throw std::invalid_argument(std::string(op) + ": dimension mismatch");
}

} // namespace

ScalarField field_sum(const ScalarField& a, const ScalarField& b) {
    check_same_dim(a, b, "field_sum");
    ScalarField f;
    f.dim = a.dim;
    f.eval = [a, b](std::span<const double> x) { return a.eval(x) + b.eval(x); };
    if (a.has_grad() && b.has_grad()) {
        f.grad = [a, b](std::span<const double> x, std::span<double> g) {
            a.grad(x, g);
            std::vector<double> gb(b.dim);
            b.grad(x, gb);
            for (int i = 0; i < (int)gb.size(); ++i) g[i] += gb[i];
        };
    }
    return f;
}

ScalarField field_difference(const ScalarField& a, const ScalarField& b) {
    return field_sum(a, field_scaled(b, -1.0));
}

ScalarField field_product(const ScalarField& a, const ScalarField& b) {
    check_same_dim(a, b, "field_product");
    ScalarField f;
    f.dim = a.dim;
    f.eval = [a, b](std::span<const double> x) { return a.eval(x) * b.eval(x); };
    if (a.has_grad() && b.has_grad()) {
        f.grad = [a, b](std::span<const double> x, std::span<double> g) {
            const double va = a.eval(x), vb = b.eval(x);
            a.grad(x, g);
            std::vector<double> gb(b.dim);
            b.grad(x, gb);
            for (int i = 0; i < (int)gb.size(); ++i) g[i] = g[i] * vb + gb[i] * va;
        };
    }
    return f;
}

ScalarField field_scaled(const ScalarField& a, double c) {
    ScalarField f;
    f.dim = a.dim;
    f.eval = [a, c](std::span<const double> x) { return c * a.eval(x); };
    if (a.has_grad()) {
        f.grad = [a, c](std::span<const double> x, std::span<double> g) {
            a.grad(x, g);
            for (auto& v : g) v *= c;
        };
    }
    return f;
}

ScalarField field_compose(const ScalarField& outer, std::vector<ScalarField> inner) {
    if ((int)inner.size() != outer.dim)
        throw std::invalid_argument("field_compose: inner count must equal outer dim");
    const int dim = inner.empty() ? 0 : inner.front().dim;
    for (const auto& c : inner)
        if (c.dim != dim) throw std::invalid_argument("field_compose: inner dims differ");

    ScalarField f;
    f.dim = dim;
    auto image = [inner](std::span<const double> x) {
        std::vector<double> y(inner.size());
        for (size_t j = 0; j < inner.size(); ++j) y[j] = inner[j].eval(x);
        return y;
    };
    f.eval = [outer, image](std::span<const double> x) { return outer.eval(image(x)); };

    bool exact = outer.has_grad();
    for (const auto& c : inner) exact = exact && c.has_grad();
    if (exact) {
        f.grad = [outer, inner, image, dim](std::span<const double> x, std::span<double> g) {
            const auto y = image(x);
            std::vector<double> gout(outer.dim);
            outer.grad(y, gout);
            std::fill(g.begin(), g.end(), 0.0);
            std::vector<double> gin(dim);
            for (size_t j = 0; j < inner.size(); ++j) {
                inner[j].grad(x, gin);
                for (int i = 0; i < dim; ++i) g[i] += gout[j] * gin[i];
            }
        };
    }
    return f;
}

ScalarField field_extend(const ScalarField& inner, int dim) {
    if (dim < inner.dim)
        throw std::invalid_argument("field_extend: cannot shrink");
    ScalarField f;
    f.dim = dim;
    const int idim = inner.dim;
    f.eval = [inner, idim](std::span<const double> x) { return inner.eval(x.first(idim)); };
    if (inner.has_grad()) {
        f.grad = [inner, idim](std::span<const double> x, std::span<double> g) {
            std::fill(g.begin(), g.end(), 0.0);
            inner.grad(x.first(idim), g.first(idim));
        };
    }
    return f;
}

// =============================================================================
// Gradients
// =============================================================================

double fd_default_scale() {
    static const double s = std::cbrt(std::numeric_limits<double>::epsilon());
    return s;
}

std::vector<double> fd_gradient(const ScalarField& f, std::span<const double> x,
                                double scale) {
    if ((int)x.size() != f.dim)
        throw std::invalid_argument("fd_gradient: point dimension mismatch");
    std::vector<double> g(f.dim);
    std::vector<double> probe(x.begin(), x.end());
    for (int j = 0; j < f.dim; ++j) {
        const double h = scale * std::max(1.0, std::abs(x[j]));
        const double xj = probe[j];
        probe[j] = xj + h;
        const double fp = f.eval(probe);
        probe[j] = xj - h;
        const double fm = f.eval(probe);
        probe[j] = xj;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::runtime_error("non-finite evaluation at coordinate " +
                                     std::to_string(j));
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

std::vector<double> gradient(const ScalarField& f, std::span<const double> x) {
    if ((int)x.size() != f.dim)
        throw std::invalid_argument("gradient: point dimension mismatch");
    if (f.has_grad()) {
        std::vector<double> g(f.dim);
        f.grad(x, g);
        return g;
    }
    return fd_gradient(f, x);
}

std::vector<double> gradient(const ScalarField& f, const Point& at) {
    return gradient(f, at.view());
}

void gradient_into(const ScalarField& f, std::span<const double> x,
                   std::span<double> out) {
    if ((int)x.size() != f.dim || (int)out.size() != f.dim)
        throw std::invalid_argument("gradient_into: dimension mismatch");
    if (f.has_grad()) {
        f.grad(x, out);
        return;
    }
    const auto g = fd_gradient(f, x);
    std::copy(g.begin(), g.end(), out.begin());
}

// =============================================================================
// Determinant kernel
// =============================================================================

double lu_determinant(std::vector<double> m, int n) {
    return lu_determinant(std::span<double>(m), n);
}

double lu_determinant(std::span<double> m, int n) {
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(m[col * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(m[r * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != col) {
            for (int c = col; c < n; ++c) std::swap(m[pivot * n + c], m[col * n + c]);
            det = -det;
        }
        const double d = m[col * n + col];
        det *= d;
        for (int r = col + 1; r < n; ++r) {
            const double factor = m[r * n + col] / d;
            if (factor == 0.0) continue;
            for (int c = col + 1; c < n; ++c) m[r * n + c] -= factor * m[col * n + c];
        }
    }
    return det;
}

std::vector<double> jacobian_matrix(std::span<const ScalarField> fields,
                                    std::span<const double> x,
                                    std::span<const int> axes) {
    const int k = (int)fields.size();
    const int cols = (int)axes.size();
    std::vector<double> m(k * cols);
    for (int a = 0; a < k; ++a) {
        if ((int)x.size() != fields[a].dim)
            throw std::invalid_argument("jacobian_matrix: point dimension mismatch");
        const auto g = gradient(fields[a], x);
        for (int b = 0; b < cols; ++b) m[a * cols + b] = g[axes[b]];
    }
    for (const auto& v : m)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite Jacobian entry");
    return m;
}

double jacobian_determinant(std::span<const ScalarField> fields,
                            std::span<const double> x,
                            std::span<const int> axes) {
    const int k = (int)fields.size();
    if (k == 0) throw std::invalid_argument("empty Jacobian");
    if ((int)axes.size() != k)
        throw std::invalid_argument("jacobian_determinant: need one axis per field");
    for (int b = 0; b < k; ++b) {
        if (axes[b] < 0 || axes[b] >= (int)x.size())
            throw std::invalid_argument("jacobian_determinant: axis out of range");
        for (int c = b + 1; c < k; ++c)
            if (axes[b] == axes[c])
                throw std::invalid_argument("jacobian_determinant: duplicate axis");
    }
    return lu_determinant(jacobian_matrix(fields, x, axes), k);
}

double jacobian_determinant(std::span<const ScalarField> fields, const Point& at,
                            std::span<const int> axes) {
    return jacobian_determinant(fields, at.view(), axes);
}

int permutation_sign(std::span<const int> indices) {
    int sign = 1;
    for (size_t i = 0; i < indices.size(); ++i)
        for (size_t j = i + 1; j < indices.size(); ++j) {
            if (indices[i] == indices[j]) return 0;
            if (indices[i] > indices[j]) sign = -sign;
        }
    return sign;
}

} // namespace nambu
