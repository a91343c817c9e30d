#include "nambu/embedding.hpp"

#include "nambu/brackets.hpp"
#include "nambu/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nambu {

namespace {

bool maps_start_with_identity(const LiftSpec& spec) {
    // Structural check used to derive lifted Hamiltonians for graph lifts;
    // verified numerically at the origin-of-use sample points anyway.
    return (int)spec.maps.size() >= spec.source_arity();
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

double lift_residual_at(const LiftSpec& spec, std::span<const double> x) {
    const int N = spec.source_arity();
    const int total = (int)spec.maps.size();
    const int r = total - N;
    const Layout source_layout = spec.source.layout;
    if (source_layout.subsystems != 1)
        throw std::invalid_argument("verify_lift_conditions: single multiplet required");

    const auto y = [&] {
        std::vector<double> v(total);
        for (int j = 0; j < total; ++j) v[j] = spec.maps[j].eval(x);
        return v;
    }();

    // Candidate gradients in the lifted space.
    std::vector<std::vector<double>> gG;
    for (const auto& c : spec.candidates) {
        if (c.dim != total)
            throw std::invalid_argument("verify_lift_conditions: candidate dim");
        gG.push_back(gradient(c, y));
    }

    double worst = 0.0;
    std::vector<int> head(N);
    std::iota(head.begin(), head.end(), 0);
    do {
        // LHS: eps(head, sorted complement) * det d(G_1..G_r)/d(y_complement).
        std::vector<int> comp;
        for (int j = 0; j < total; ++j)
            if (!std::binary_search(head.begin(), head.end(), j)) comp.push_back(j);
        std::vector<int> perm = head;
        perm.insert(perm.end(), comp.begin(), comp.end());
        const int sign = permutation_sign(perm);
        double lhs = (double)sign;
        if (r > 0) {
            std::vector<double> m(r * r);
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b) m[a * r + b] = gG[a][comp[b]];
            lhs = sign * lu_determinant(std::move(m), r);
        }

        // RHS: the N-fold bracket of the selected maps in the source space.
        std::vector<ScalarField> selected;
        selected.reserve(N);
        for (const int j : head) selected.push_back(spec.maps[j]);
        const double rhs = nambu_bracket(selected, x, source_layout);

        worst = std::max(worst, std::abs(lhs - rhs));
    } while (next_combination(head, total));
    return worst;
}

} // namespace

LiftSpec make_graph_lift(NambuSystem source, std::vector<ScalarField> extra) {
    const int N = source.layout.arity;
    if (source.layout.subsystems != 1)
        throw std::invalid_argument("make_graph_lift: single multiplet required");
    LiftSpec spec;
    spec.source = std::move(source);
    for (int i = 0; i < N; ++i) spec.maps.push_back(coordinate_field(N, i));
    const int total = N + (int)extra.size();
    for (size_t c = 0; c < extra.size(); ++c) {
        if (extra[c].dim != N)
            throw std::invalid_argument("make_graph_lift: extra map dim");
        spec.maps.push_back(extra[c]);
        spec.candidates.push_back(field_difference(
            coordinate_field(total, N + (int)c), field_extend(extra[c], total)));
    }
    return spec;
}

double verify_lift_conditions(const LiftSpec& spec,
                              std::span<const std::vector<double>> source_points,
                              ExecutionPolicy policy) {
    if ((int)spec.candidates.size() != spec.extra())
        throw std::invalid_argument("verify_lift_conditions: one candidate per extra map");
    if (source_points.empty()) return 0.0;
    return indexed_max(
        (std::int64_t)source_points.size(),
        [&](std::int64_t i) { return lift_residual_at(spec, source_points[(size_t)i]); },
        policy);
}

std::vector<double> lift_point(const LiftSpec& spec, std::span<const double> x) {
    std::vector<double> y(spec.maps.size());
    for (size_t j = 0; j < spec.maps.size(); ++j) y[j] = spec.maps[j].eval(x);
    return y;
}

NambuSystem lift_nambu_system(const LiftSpec& spec,
                              std::span<const std::vector<double>> source_points,
                              double threshold) {
    const int r = spec.extra();
    if (r < 0) throw std::invalid_argument("lift_nambu_system: fewer maps than arity");
    if (r == 0) return spec.source;

    const double residual = verify_lift_conditions(spec, source_points);
    if (!(residual <= threshold)) {
        std::ostringstream msg;
        msg << "lift_nambu_system: condition residual " << residual
            << " exceeds threshold " << threshold;
        throw std::runtime_error(msg.str());
    }

    const int N = spec.source_arity();
    const int total = N + r;

    std::vector<ScalarField> hams;
    if (!spec.lifted_hamiltonians.empty()) {
        if ((int)spec.lifted_hamiltonians.size() != N - 1)
            throw std::invalid_argument("lift_nambu_system: need N-1 lifted Hamiltonians");
        hams = spec.lifted_hamiltonians;
    } else {
        if (!maps_start_with_identity(spec))
            throw std::invalid_argument(
                "lift_nambu_system: non-graph lift needs explicit lifted Hamiltonians");
        hams.push_back(field_extend(spec.source.effective_hamiltonian(), total));
        for (const auto& g : spec.source.constraints)
            hams.push_back(field_extend(g, total));
    }

    std::vector<ScalarField> constraints(hams.begin() + 1, hams.end());
    for (const auto& c : spec.candidates) constraints.push_back(c);
    return make_nambu_system(multiplet_layout(1, total), hams.front(),
                             std::move(constraints));
}

} // namespace nambu
