#pragma once

#include "nambu/reduce.hpp"
#include "nambu/systems.hpp"

#include <span>
#include <vector>

namespace nambu {

/// Lift of an N-plet system to an (N+r)-plet through maps y_j(x_1..x_N) with
/// candidate induced constraints on the enlarged space. Graph-style lifts
/// (identity on the first N maps, y_{N+c} = phi_c(x)) can derive the lifted
/// Hamiltonians automatically; other lifts must supply them.
struct LiftSpec {
    NambuSystem source;
    std::vector<ScalarField> maps;          // N+r fields on the source space
    std::vector<ScalarField> candidates;    // r fields on the lifted space
    std::vector<ScalarField> lifted_hamiltonians; // optional: H then source G's

    int source_arity() const { return source.layout.arity; }
    int extra() const { return (int)maps.size() - source_arity(); }
};

/// Build a graph-style lift: y_1..y_N the coordinates, y_{N+c} = extra[c],
/// candidates y_{N+c} - extra[c].
LiftSpec make_graph_lift(NambuSystem source, std::vector<ScalarField> extra);

/// Max over points and sorted index tuples (j_1 < ... < j_N) of
/// | (1/r!) sum eps d(G_1..G_r)/d(y_tail) - {y_j1, ..., y_jN}_NB |.
double verify_lift_conditions(const LiftSpec& spec,
                              std::span<const std::vector<double>> source_points,
                              ExecutionPolicy policy = ExecutionPolicy::parallel);

/// The (N+r)-plet system whose Hamiltonians are the lifted originals plus the
/// verified candidates. Verifies the lift conditions on the sample first and
/// refuses (with the residual attached) above the threshold. r = 0 returns the
/// source unchanged.
NambuSystem lift_nambu_system(const LiftSpec& spec,
                              std::span<const std::vector<double>> source_points,
                              double threshold = 1e-8);

/// Push a source-space point up through the lift maps.
std::vector<double> lift_point(const LiftSpec& spec, std::span<const double> x);

} // namespace nambu
