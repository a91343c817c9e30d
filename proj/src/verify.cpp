#include "nambu/verify.hpp"

#include "nambu/brackets.hpp"
#include "nambu/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nambu {

namespace {

// Residual of the induced-constraint conditions at one chart point.
double induced_residual_at(const VariableMap& map,
                           std::span<const ScalarField> constraints,
                           std::span<const double> chart_pt) {
    const int n = map.chart.subsystems;
    if (map.image_dim % n != 0)
        throw std::invalid_argument("verify_induced_constraints: image not a multiplet");
    const int N = map.image_dim / n;
    if ((int)constraints.size() != N - 2)
        throw std::invalid_argument("verify_induced_constraints: need N-2 constraints");

    const auto w = map.apply(chart_pt);

    // Constraint gradients in multiplet space, along the embedded surface.
    std::vector<std::vector<double>> gG;
    gG.reserve(constraints.size());
    for (const auto& g : constraints) {
        if (g.dim != map.image_dim)
            throw std::invalid_argument("verify_induced_constraints: constraint dim");
        gG.push_back(gradient(g, w));
    }

    double worst = 0.0;
    std::vector<int> fixed(2);
    for (int k = 0; k < n; ++k) {
        for (int i1 = 0; i1 < N; ++i1) {
            for (int i2 = i1 + 1; i2 < N; ++i2) {
                // eps(i1, i2, sorted complement) * det of the constraint
                // gradients over the complement columns of subsystem k.
                std::vector<int> comp;
                for (int j = 0; j < N; ++j)
                    if (j != i1 && j != i2) comp.push_back(j);
                fixed[0] = i1;
                fixed[1] = i2;
                std::vector<int> perm = {i1, i2};
                perm.insert(perm.end(), comp.begin(), comp.end());
                const int sign = permutation_sign(perm);

                double lhs = (double)sign;
                if (!comp.empty()) {
                    const int r = (int)comp.size();
                    std::vector<double> m(r * r);
                    for (int a = 0; a < r; ++a)
                        for (int b = 0; b < r; ++b)
                            m[a * r + b] = gG[a][k * N + comp[b]];
                    lhs = sign * lu_determinant(std::move(m), r);
                }
                const double rhs =
                    map_pair_bracket(map, k * N + i1, k * N + i2, chart_pt);
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
    }
    return worst;
}

} // namespace

double verify_induced_constraints(const VariableMap& map,
                                  std::span<const ScalarField> constraints,
                                  std::span<const std::vector<double>> chart_points,
                                  ExecutionPolicy policy) {
    if (chart_points.empty()) return 0.0;
    return indexed_max(
        (std::int64_t)chart_points.size(),
        [&](std::int64_t i) {
            return induced_residual_at(map, constraints, chart_points[(size_t)i]);
        },
        policy);
}

double verify_induced_constraints_at_image(
    const VariableMap& map, std::span<const ScalarField> constraints,
    std::span<const std::vector<double>> image_points, ExecutionPolicy policy) {
    if (!map.has_inverse())
        throw std::runtime_error("constraint check needs inverse or embedding");
    std::vector<std::vector<double>> chart_points;
    chart_points.reserve(image_points.size());
    for (const auto& w : image_points) chart_points.push_back(map.inverse_hint(w));
    return verify_induced_constraints(map, constraints, chart_points, policy);
}

double verify_constraint_constancy(const ScalarField& constraint,
                                   std::span<const ScalarField> probes,
                                   const VariableMap& map,
                                   std::span<const std::vector<double>> chart_points,
                                   ExecutionPolicy policy) {
    if (probes.empty())
        throw std::invalid_argument("verify_constraint_constancy: probes required");
    const ScalarField pulled = pullback_to_chart(constraint, map);
    if (chart_points.empty()) return 0.0;
    const std::int64_t total = (std::int64_t)chart_points.size() * (std::int64_t)probes.size();
    return indexed_max(
        total,
        [&](std::int64_t flat) {
            const auto& pt = chart_points[(size_t)(flat / (std::int64_t)probes.size())];
            const auto& u = probes[(size_t)(flat % (std::int64_t)probes.size())];
            return std::abs(poisson_bracket(pulled, u, pt, map.chart));
        },
        policy);
}

// =============================================================================
// Generalized-system conditions
// =============================================================================

namespace {

struct BlockData {
    std::vector<double> g;                  // metric at w
    std::vector<std::vector<double>> gG;    // constraint gradients at w
    double detz = 1.0;                      // det d(G)/d(z)
};

BlockData block_data(const GeneralizedBlock& block, std::span<const double> w) {
    BlockData d;
    d.g = block_metric(block, w);
    for (const auto& c : block.constraints) d.gG.push_back(gradient(c, w));
    const int m = block.z_count();
    if (m > 0) {
        std::vector<double> jz(m * m);
        for (int s = 0; s < m; ++s)
            for (int t = 0; t < m; ++t) jz[s * m + t] = d.gG[s][block.z_indices[t]];
        d.detz = lu_determinant(std::move(jz), m);
    }
    return d;
}

// det of the constraint gradients over z-columns with slots replaced by
// x-columns: slot -> column index overrides.
double constraint_minor(const BlockData& d, const GeneralizedBlock& block,
                        std::span<const std::pair<int, int>> overrides) {
    const int m = block.z_count();
    std::vector<int> cols(block.z_indices.begin(), block.z_indices.end());
    for (const auto& [slot, col] : overrides) cols[slot] = col;
    std::vector<double> mm(m * m);
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) mm[s * m + t] = d.gG[s][cols[t]];
    return lu_determinant(std::move(mm), m);
}

GeneralizedResiduals generalized_residuals_at(const GeneralizedNambuSystem& gsys,
                                              const VariableMap& map,
                                              std::span<const double> chart_pt) {
    if (map.image_dim != gsys.dim)
        throw std::invalid_argument("verify_generalized_conditions: map/system dims");
    const auto w = map.apply(chart_pt);

    GeneralizedResiduals res;
    for (const auto& block : gsys.blocks) {
        const auto d = block_data(block, w);
        const int nx = block.x_count(), m = block.z_count();
        if (m > 0 && std::abs(d.detz) < 1e-14)
            throw std::runtime_error("degenerate z-block");

        // (x, x): {x_a, x_b}/2 = g_ab det d(G)/d(z).
        for (int a = 0; a < nx; ++a)
            for (int b = a + 1; b < nx; ++b) {
                const double pb = map_pair_bracket(map, block.x_indices[a],
                                                   block.x_indices[b], chart_pt);
                res.xx = std::max(res.xx,
                                  std::abs(0.5 * pb - d.g[a * nx + b] * d.detz));
            }

        // (x, z): {x_a, z_s}/2 = -sum_b g_ab det(... x_b in slot s ...).
        for (int a = 0; a < nx; ++a)
            for (int s = 0; s < m; ++s) {
                const double pb = map_pair_bracket(map, block.x_indices[a],
                                                   block.z_indices[s], chart_pt);
                double rhs = 0.0;
                for (int b = 0; b < nx; ++b) {
                    const double gab = d.g[a * nx + b];
                    if (gab == 0.0) continue;
                    const std::pair<int, int> ov[] = {{s, block.x_indices[b]}};
                    rhs -= gab * constraint_minor(d, block, ov);
                }
                res.xz = std::max(res.xz, std::abs(0.5 * pb - rhs));
            }

        // (z, z): {z_s, z_t} = sum_ab g_ab det(... x_a slot s, x_b slot t ...).
        for (int s = 0; s < m; ++s)
            for (int t = s + 1; t < m; ++t) {
                const double pb = map_pair_bracket(map, block.z_indices[s],
                                                   block.z_indices[t], chart_pt);
                double rhs = 0.0;
                for (int a = 0; a < nx; ++a)
                    for (int b = 0; b < nx; ++b) {
                        const double gab = d.g[a * nx + b];
                        if (gab == 0.0) continue;
                        const std::pair<int, int> ov[] = {
                            {s, block.x_indices[a]}, {t, block.x_indices[b]}};
                        rhs += gab * constraint_minor(d, block, ov);
                    }
                res.zz = std::max(res.zz, std::abs(pb - rhs));
            }
    }
    return res;
}

} // namespace

GeneralizedResiduals verify_generalized_conditions(
    const GeneralizedNambuSystem& gsys, const VariableMap& map,
    std::span<const std::vector<double>> chart_points, ExecutionPolicy policy) {
    GeneralizedResiduals out;
    if (chart_points.empty()) return out;
    const auto n = (std::int64_t)chart_points.size();
    out.xx = indexed_max(
        n, [&](std::int64_t i) {
            return generalized_residuals_at(gsys, map, chart_points[(size_t)i]).xx;
        },
        policy);
    out.xz = indexed_max(
        n, [&](std::int64_t i) {
            return generalized_residuals_at(gsys, map, chart_points[(size_t)i]).xz;
        },
        policy);
    out.zz = indexed_max(
        n, [&](std::int64_t i) {
            return generalized_residuals_at(gsys, map, chart_points[(size_t)i]).zz;
        },
        policy);
    return out;
}

std::vector<double> metric_from_conditions(const GeneralizedNambuSystem& gsys,
                                           const VariableMap& map, int block_index,
                                           std::span<const double> chart_point) {
    const auto& block = gsys.blocks.at(block_index);
    const auto w = map.apply(chart_point);
    const auto d = block_data(block, w);
    if (block.z_count() > 0 && std::abs(d.detz) < 1e-14)
        throw std::runtime_error("degenerate z-block");
    const int nx = block.x_count();
    std::vector<double> g(nx * nx, 0.0);
    for (int a = 0; a < nx; ++a)
        for (int b = 0; b < nx; ++b) {
            if (a == b) continue;
            const double pb = map_pair_bracket(map, block.x_indices[a],
                                               block.x_indices[b], chart_point);
            g[a * nx + b] = 0.5 * pb / d.detz;
        }
    return g;
}

// =============================================================================
// Metric transformation
// =============================================================================

std::vector<double> metric_pullback(const MetricField& g,
                                    std::span<const ScalarField> change_map,
                                    std::span<const double> x) {
    const int d = (int)change_map.size();
    if (d == 0) throw std::invalid_argument("metric_pullback: empty change map");
    for (const auto& c : change_map)
        if (c.dim != (int)x.size())
            throw std::invalid_argument("metric_pullback: change map dim vs point");

    std::vector<double> jac(d * d);
    for (int a = 0; a < d; ++a) {
        const auto grad_a = gradient(change_map[a], x);
        if ((int)grad_a.size() != d)
            throw std::invalid_argument("metric_pullback: change map must be square");
        for (int c = 0; c < d; ++c) jac[a * d + c] = grad_a[c];
    }
    if (lu_determinant(jac, d) == 0.0)
        throw std::runtime_error("non-invertible change of variables");

    std::vector<double> gv(d * d);
    g(x, gv);
    std::vector<double> out(d * d, 0.0);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            double acc = 0.0;
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    acc += jac[a * d + c] * jac[b * d + e] * gv[c * d + e];
            out[a * d + b] = acc;
        }
    return out;
}

} // namespace nambu
