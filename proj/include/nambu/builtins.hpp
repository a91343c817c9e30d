#pragma once

#include "nambu/statmech.hpp"
#include "nambu/systems.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace nambu {

struct BuiltinParams {
    double mass = 1.0;
    double frequency = 1.0;
    double light_speed = 1.0;
};

/// A built-in system wired with exact gradients: the chart-side Hamiltonian
/// system, the redundant-variable map, and whichever extended description the
/// construction defines.
struct BuiltinBundle {
    std::string name;
    HamiltonianSystem hamiltonian_system;
    VariableMap map;
    std::optional<NambuSystem> nambu;
    std::optional<GeneralizedNambuSystem> generalized;
    std::optional<ConstraintSpec> constraint_spec;
    std::optional<BranchSolver> branches;
};

/// name in {quadratic-triplet, quartet-ex-b, harmonic-oscillator-triplet,
/// relativistic-a, relativistic-b, relativistic-c}.
BuiltinBundle make_builtin(std::string_view name, const BuiltinParams& params = {});

std::vector<std::string> builtin_names();

// =============================================================================
// Relativistic gauge reduction
// =============================================================================

enum class EnergyBranch { negative_p0, positive_p0 };

struct RelativisticReduction {
    /// Three doublets (Q^i, P_i) with K = -c P_0 on the solved branch.
    HamiltonianSystem reduced;
    /// phi = p^mu p_mu - m^2 c^2 and chi = q^0 - c tau on the original
    /// 8-dimensional chart (q^0, p_0, q^1, p_1, q^2, p_2, q^3, p_3).
    ConstraintSpec spec;
    /// Transformed constraint Phi = P^mu P_mu - m^2 c^2 and its solved branch
    /// Psi, both on the transformed 8-dimensional chart.
    ScalarField Phi;
    ScalarField Psi;
    EnergyBranch branch = EnergyBranch::negative_p0;
};

RelativisticReduction gauge_reduce_relativistic(
    const BuiltinParams& params, EnergyBranch branch = EnergyBranch::negative_p0);

} // namespace nambu
