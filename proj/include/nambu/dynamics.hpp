#pragma once

#include "nambu/systems.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nambu {

// =============================================================================
// Right-hand sides
// =============================================================================

/// A velocity field with an optional exact Jacobian (row-major dim x dim);
/// central differences otherwise.
struct VelocityField {
    int dim = 0;
    std::function<void(std::span<const double>, std::span<double>)> eval;
    std::function<void(std::span<const double>, std::span<double>)> jacobian;

    std::vector<double> operator()(std::span<const double> x) const {
        std::vector<double> v(dim);
        eval(x, v);
        return v;
    }
};

/// (dq_k, dp_k) = (dH/dp_k, -dH/dq_k).
std::vector<double> hamiltonian_rhs(const HamiltonianSystem& sys,
                                    std::span<const double> x);
VelocityField hamiltonian_rhs_field(const HamiltonianSystem& sys);

/// dx_i = {x_i, H, G_1, ..., G_{N-2}}_NB (gauge terms folded into H).
std::vector<double> nambu_rhs(const NambuSystem& sys, std::span<const double> x);
VelocityField nambu_rhs_field(const NambuSystem& sys);

/// dw_l = sum over blocks and (a,b) of g_ab d(w_l, H, G_1..G_m)/d(x_a, x_b, z_1..z_m).
std::vector<double> generalized_nambu_rhs(const GeneralizedNambuSystem& sys,
                                          std::span<const double> w);
VelocityField generalized_nambu_rhs_field(const GeneralizedNambuSystem& sys);

/// Triplet equations of motion from the least-action route: each component a
/// difference of dH terms weighted by the 2x2 chart Jacobians, evaluated at
/// the chart preimage of the multiplet point.
std::vector<double> least_action_rhs(const VariableMap& map, const ScalarField& H,
                                     std::span<const double> x);
VelocityField least_action_rhs_field(const VariableMap& map, const ScalarField& H);

// =============================================================================
// Integration
// =============================================================================

struct IntegratorConfig {
    enum class Method { explicit_euler, rk4 };
    Method method = Method::rk4;
    double dt = 1e-3;
    long steps = 1000;
    /// Co-evolve the tangent flow M, dM/dt = (d rhs/dx) M, and record det M.
    bool variational = false;
};

struct Observable {
    std::string name;
    ScalarField field;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<std::string> diagnostic_names;
    std::vector<std::vector<double>> diagnostics; // one row per step
    bool truncated = false;
    std::string error;

    long size() const { return (long)times.size(); }
};

/// Fixed-step trajectory with per-step diagnostics. A non-finite state
/// truncates the trajectory at the last good step and sets the error flag.
Trajectory integrate(const VelocityField& rhs, std::span<const double> start,
                     const IntegratorConfig& cfg,
                     std::span<const Observable> observables = {});

/// det of the tangent-flow matrix after integrating to time t (steps chosen
/// from cfg.dt so the end time is exact).
double flow_volume_jacobian(const VelocityField& rhs, std::span<const double> start,
                            double t, IntegratorConfig cfg);

/// Diagnostics every Nambu trajectory should carry: each constraint and the
/// Hamiltonian.
std::vector<Observable> nambu_observables(const NambuSystem& sys);

// =============================================================================
// Trajectory CSV (17 significant digits; round-trips exactly)
// =============================================================================

void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

} // namespace nambu
