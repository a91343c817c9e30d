#include "nambu/brackets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nambu {

namespace {

// Gradients of all fields stacked row-major: rows = fields, cols = coords.
std::vector<double> gradient_stack(std::span<const ScalarField> fields,
                                   std::span<const double> x) {
    const int dim = (int)x.size();
    std::vector<double> rows((size_t)fields.size() * dim);
    for (size_t a = 0; a < fields.size(); ++a) {
        if (fields[a].dim != dim)
            throw std::invalid_argument("bracket: field dimension mismatch");
        const auto g = gradient(fields[a], x);
        std::copy(g.begin(), g.end(), rows.begin() + a * dim);
    }
    return rows;
}

// Per-subsystem sum of arity x arity determinants of the stacked gradients.
double subsystem_jacobian_sum(const std::vector<double>& rows, const Layout& layout) {
    const int n = layout.subsystems, arity = layout.arity, dim = layout.dim();
    double total = 0.0;
    std::vector<double> block(arity * arity);
    for (int k = 0; k < n; ++k) {
        for (int a = 0; a < arity; ++a)
            for (int b = 0; b < arity; ++b)
                block[a * arity + b] = rows[a * dim + k * arity + b];
        total += lu_determinant(block, arity);
    }
    return total;
}

} // namespace

double poisson_bracket(const ScalarField& A, const ScalarField& B,
                       std::span<const double> x, const Layout& layout) {
    if (layout.arity != 2) throw std::invalid_argument("layout mismatch: Poisson bracket needs arity-2 doublets");
    if ((int)x.size() != layout.dim()) throw std::invalid_argument("layout mismatch: point size vs layout");
    const ScalarField fields[] = {A, B};
    return subsystem_jacobian_sum(gradient_stack(fields, x), layout);
}

double poisson_bracket(const ScalarField& A, const ScalarField& B, const Point& at,
                       const BracketContext& ctx) {
    return poisson_bracket(A, B, at.view(), ctx.layout);
}

double nambu_bracket(std::span<const ScalarField> fields, std::span<const double> x,
                     const Layout& layout) {
    if ((int)fields.size() != layout.arity)
        throw std::invalid_argument("arity mismatch: Nambu bracket needs exactly N fields");
    if (layout.arity < 2) throw std::invalid_argument("arity mismatch: arity must be >= 2");
    if ((int)x.size() != layout.dim()) throw std::invalid_argument("layout mismatch: point size vs layout");
    return subsystem_jacobian_sum(gradient_stack(fields, x), layout);
}

double nambu_bracket(std::span<const ScalarField> fields, const Point& at,
                     const BracketContext& ctx) {
    return nambu_bracket(fields, at.view(), ctx.layout);
}

// =============================================================================
// Jacobian decomposition
// =============================================================================

namespace {

double minor_det(const std::vector<double>& rows, int dim, int row_begin,
                 std::span<const int> cols) {
    const int k = (int)cols.size();
    std::vector<double> m(k * k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) m[a * k + b] = rows[(row_begin + a) * dim + cols[b]];
    return lu_determinant(std::move(m), k);
}

// eps(S_sorted..., complement_sorted...) for a subset S of {0..n-1}.
int shuffle_sign(std::span<const int> subset, int n) {
    std::vector<int> perm(subset.begin(), subset.end());
    for (int i = 0; i < n; ++i)
        if (!std::binary_search(subset.begin(), subset.end(), i)) perm.push_back(i);
    return permutation_sign(perm);
}

bool next_combination(std::vector<int>& c, int n) {
    const int k = (int)c.size();
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - (k - i)) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

} // namespace

double jacobian_split_sum(std::span<const ScalarField> fields,
                          std::span<const double> x, int head_count, int tail_count) {
    const int n = (int)x.size();
    if (head_count < 1 || tail_count < 0 || head_count + tail_count != n)
        throw std::invalid_argument("jacobian_split_sum: head+tail must equal dimension");
    if ((int)fields.size() != n)
        throw std::invalid_argument("jacobian_split_sum: need one field per coordinate");

    const auto rows = gradient_stack(fields, x);
    if (tail_count == 0) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        return minor_det(rows, n, 0, all);
    }

    std::vector<int> head(head_count);
    std::iota(head.begin(), head.end(), 0);
    std::vector<int> tail(tail_count);
    double total = 0.0;
    do {
        tail.clear();
        for (int i = 0; i < n; ++i)
            if (!std::binary_search(head.begin(), head.end(), i)) tail.push_back(i);
        const int sign = shuffle_sign(head, n);
        total += sign * minor_det(rows, n, 0, head) * minor_det(rows, n, head_count, tail);
    } while (next_combination(head, n));
    return total;
}

double verify_jacobian_decomposition(std::span<const ScalarField> fields,
                                     std::span<const double> x, int head_count,
                                     int tail_count) {
    const int n = (int)x.size();
    std::vector<int> axes(n);
    std::iota(axes.begin(), axes.end(), 0);
    const double full = jacobian_determinant(fields, x, axes);
    const double split = jacobian_split_sum(fields, x, head_count, tail_count);
    return std::abs(full - split);
}

double verify_jacobian_decomposition(std::span<const ScalarField> fields,
                                     const Point& at, int head_count, int tail_count) {
    return verify_jacobian_decomposition(fields, at.view(), head_count, tail_count);
}

double epsilon_complement_minor(std::span<const ScalarField> fields,
                                std::span<const double> x, int dim,
                                std::span<const int> fixed) {
    std::vector<int> comp;
    for (int i = 0; i < dim; ++i)
        if (std::find(fixed.begin(), fixed.end(), i) == fixed.end()) comp.push_back(i);
    if ((int)fields.size() != (int)comp.size())
        throw std::invalid_argument("epsilon_complement_minor: field count vs complement size");

    std::vector<int> perm(fixed.begin(), fixed.end());
    perm.insert(perm.end(), comp.begin(), comp.end());
    const int sign = permutation_sign(perm);
    if (sign == 0) return 0.0;
    if (comp.empty()) return sign;

    const auto rows = gradient_stack(fields, x);
    return sign * minor_det(rows, dim, 0, comp);
}

} // namespace nambu
