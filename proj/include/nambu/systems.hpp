#pragma once

#include "nambu/layout.hpp"
#include "nambu/scalar_field.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nambu {

// =============================================================================
// System definitions
// =============================================================================

/// n canonical doublets with a Hamiltonian on the 2n-dimensional chart.
struct HamiltonianSystem {
    int pairs = 1;
    ScalarField hamiltonian;

    Layout layout() const { return doublet_layout(pairs); }
};

HamiltonianSystem make_hamiltonian_system(int pairs, ScalarField H);

/// The bundle of maps x_i(q,p) from a canonical chart into a redundant
/// variable space, with an optional branch-resolving inverse.
struct VariableMap {
    Layout chart;
    int image_dim = 0;
    std::vector<ScalarField> components;
    std::function<std::vector<double>(std::span<const double>)> inverse_hint;

    std::vector<double> apply(std::span<const double> chart_point) const;
    bool has_inverse() const { return static_cast<bool>(inverse_hint); }
};

VariableMap make_variable_map(Layout chart, std::vector<ScalarField> components);

/// {components[i], components[j]}_PB at a chart point.
double map_pair_bracket(const VariableMap& map, int i, int j,
                        std::span<const double> chart_point);

/// Pull an image-space field back to the chart: (G o map) with chain-rule
/// gradient when both sides are exact.
ScalarField pullback_to_chart(const ScalarField& image_field, const VariableMap& map);

/// An N-plet (or n of them) evolving under N-1 Hamiltonians: the physical
/// H-tilde plus N-2 induced constraints. For several subsystems the constraint
/// fields are the summed form, one field per bracket slot.
struct NambuSystem {
    Layout layout;
    ScalarField hamiltonian;
    std::vector<ScalarField> constraints;
    std::vector<ScalarField> gauge_terms;

    int arity() const { return layout.arity; }

    /// H-tilde + sum_b gauge_terms[b] * constraints[b].
    ScalarField effective_hamiltonian() const;
};

NambuSystem make_nambu_system(Layout layout, ScalarField H,
                              std::vector<ScalarField> constraints);

/// One irreducible set of a generalized system: 2n_i x-coordinates with an
/// antisymmetric metric over them, m_i shared z-coordinates, and the matching
/// constraint fields (all fields live on the full w-space).
struct GeneralizedBlock {
    std::vector<int> x_indices;
    std::vector<int> z_indices;
    std::vector<ScalarField> constraints;
    std::function<void(std::span<const double>, std::span<double>)> metric;

    int x_count() const { return (int)x_indices.size(); }
    int z_count() const { return (int)z_indices.size(); }
};

struct GeneralizedNambuSystem {
    int dim = 0;
    ScalarField hamiltonian;
    std::vector<GeneralizedBlock> blocks;
};

/// Evaluate a block's metric as a row-major x_count x x_count matrix.
std::vector<double> block_metric(const GeneralizedBlock& block,
                                 std::span<const double> w);

/// First class constraints phi_s with gauge conditions chi_t on a chart.
struct ConstraintSpec {
    Layout chart;
    std::vector<ScalarField> phi;
    std::vector<ScalarField> chi;
};

/// det {phi_s, chi_t}_PB at a chart point.
double constraint_gauge_determinant(const ConstraintSpec& spec,
                                    std::span<const double> chart_point);

} // namespace nambu
