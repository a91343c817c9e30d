#pragma once

#include "nambu/reduce.hpp"
#include "nambu/systems.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nambu {

// =============================================================================
// Configuration and results
// =============================================================================

struct PartitionConfig {
    double beta = 1.0;
    /// Explicit per-chart-coordinate bounds; when empty, [-radius, radius] on
    /// every chart coordinate (Gaussian-tail truncation).
    std::vector<std::pair<double, double>> bounds;
    double radius = 8.0;

    enum class Estimator { tensor_quadrature, monte_carlo };
    Estimator estimator = Estimator::monte_carlo;

    std::int64_t samples = 1'000'000; // monte carlo
    int points_per_axis = 64;         // quadrature (kept even: no node at 0)
    std::uint64_t seed = 0x5EEDBA5Eull;

    /// Branch weights with |det dG/dz| below this are excluded and flagged.
    double weight_cutoff = 1e-12;

    ExecutionPolicy policy = ExecutionPolicy::parallel;
};

struct PartitionEstimate {
    double value = 0.0;
    /// Monte-carlo standard error, or the last-refinement delta for quadrature.
    double stderr_ = 0.0;
    std::string method;
    double beta = 0.0;
    std::uint64_t seed = 0;
    /// Upper bound on the mass dropped by the weight cutoff.
    double excluded_mass_bound = 0.0;
    std::int64_t excluded_count = 0;
    int branch_count = 1;
    /// e^{-beta R^2/2} scale of the Gaussian tail outside the domain
    /// (0 when explicit bounds were supplied).
    double tail_bound = 0.0;
};

/// Enumerates the solutions z^(a)(x,y) of the induced constraints and fills
/// them into the solved slots of a multiplet point.
struct BranchSolver {
    std::vector<int> solved_indices;
    std::vector<std::function<void(std::span<double>)>> branches;

    int branch_count() const { return (int)branches.size(); }
};

// =============================================================================
// Estimators
// =============================================================================

/// Z_H = integral prod dq dp e^{-beta H} over the truncated chart domain.
PartitionEstimate estimate_partition_hamiltonian(const HamiltonianSystem& sys,
                                                 const PartitionConfig& cfg);

/// Z_N with the constraint delta functions resolved onto branches:
/// sum_a integral |det d(G)/d(z)|^{-1} e^{-beta H-tilde(x, z^(a))} over the
/// admissible region, parameterized by the canonical chart (the area element
/// |d(x,y)/d(q,p)| carries the change of variables).
PartitionEstimate estimate_partition_nambu(const NambuSystem& nsys,
                                           const VariableMap& map,
                                           const BranchSolver& branches,
                                           const PartitionConfig& cfg);

struct NormalizationResult {
    double ratio = 0.0;
    double stderr_ = 0.0;
    int predicted_branches = 1;
    PartitionEstimate nambu;
    PartitionEstimate hamiltonian;
};

/// Z_N / Z_H with propagated relative error and the branch-count prediction.
/// Throws "degenerate denominator" when Z_H is consistent with zero.
NormalizationResult normalization_factor(const NambuSystem& nsys,
                                         const VariableMap& map,
                                         const BranchSolver& branches,
                                         const HamiltonianSystem& sys,
                                         const PartitionConfig& cfg);

/// JSON report with the fixed key set
/// {value, stderr, method, beta, seed, excluded_mass_bound, branch_count, ...}.
std::string partition_report_json(const PartitionEstimate& est);

} // namespace nambu
