#include "nambu/systems.hpp"

#include "nambu/brackets.hpp"
#include "nambu/fields.hpp"

#include <stdexcept>

namespace nambu {

HamiltonianSystem make_hamiltonian_system(int pairs, ScalarField H) {
    if (pairs < 1) throw std::invalid_argument("HamiltonianSystem: pairs must be positive");
    if (H.dim != 2 * pairs)
        throw std::invalid_argument("HamiltonianSystem: H.dim must equal 2n");
    return HamiltonianSystem{pairs, std::move(H)};
}

std::vector<double> VariableMap::apply(std::span<const double> chart_point) const {
    if ((int)chart_point.size() != chart.dim())
        throw std::invalid_argument("VariableMap::apply: chart point dimension mismatch");
    std::vector<double> out(components.size());
    for (size_t i = 0; i < components.size(); ++i) out[i] = components[i].eval(chart_point);
    return out;
}

VariableMap make_variable_map(Layout chart, std::vector<ScalarField> components) {
    VariableMap map;
    map.chart = chart;
    map.image_dim = (int)components.size();
    for (const auto& c : components)
        if (c.dim != chart.dim())
            throw std::invalid_argument("VariableMap: component dimension vs chart");
    map.components = std::move(components);
    return map;
}

double map_pair_bracket(const VariableMap& map, int i, int j,
                        std::span<const double> chart_point) {
    return poisson_bracket(map.components[i], map.components[j], chart_point, map.chart);
}

ScalarField pullback_to_chart(const ScalarField& image_field, const VariableMap& map) {
    if (image_field.dim != map.image_dim)
        throw std::invalid_argument("pullback_to_chart: field dim vs map image");
    return field_compose(image_field, map.components);
}

ScalarField NambuSystem::effective_hamiltonian() const {
    ScalarField h = hamiltonian;
    if (gauge_terms.empty()) return h;
    if (gauge_terms.size() != constraints.size())
        throw std::invalid_argument("NambuSystem: gauge term per constraint required");
    for (size_t b = 0; b < gauge_terms.size(); ++b)
        h = field_sum(h, field_product(gauge_terms[b], constraints[b]));
    return h;
}

NambuSystem make_nambu_system(Layout layout, ScalarField H,
                              std::vector<ScalarField> constraints) {
    if (layout.arity < 2) throw std::invalid_argument("NambuSystem: arity must be >= 2");
    if ((int)constraints.size() != layout.arity - 2)
        throw std::invalid_argument("NambuSystem: need N-2 constraints");
    if (H.dim != layout.dim())
        throw std::invalid_argument("NambuSystem: H dimension vs layout");
    for (const auto& g : constraints)
        if (g.dim != layout.dim())
            throw std::invalid_argument("NambuSystem: constraint dimension vs layout");
    NambuSystem sys;
    sys.layout = layout;
    sys.hamiltonian = std::move(H);
    sys.constraints = std::move(constraints);
    return sys;
}

std::vector<double> block_metric(const GeneralizedBlock& block,
                                 std::span<const double> w) {
    const int nx = block.x_count();
    std::vector<double> g(nx * nx);
    block.metric(w, g);
    return g;
}

double constraint_gauge_determinant(const ConstraintSpec& spec,
                                    std::span<const double> chart_point) {
    const int m = (int)spec.phi.size();
    if ((int)spec.chi.size() != m)
        throw std::invalid_argument("ConstraintSpec: phi/chi count mismatch");
    std::vector<double> mat(m * m);
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t)
            mat[s * m + t] = poisson_bracket(spec.phi[s], spec.chi[t], chart_point, spec.chart);
    return lu_determinant(std::move(mat), m);
}

} // namespace nambu
