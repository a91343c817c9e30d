#include "nambu/builtins.hpp"

#include "nambu/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nambu {

namespace {

double sq(double v) { return v * v; }

void zero(std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); }

// -----------------------------------------------------------------------------
// Example (a): the quadratic triplet x = (q^2 - p^2)/4, y = (q^2 + p^2)/4,
// z = qp/2 with induced constraint (x^2 - y^2 + z^2)/2.
// -----------------------------------------------------------------------------

VariableMap quadratic_triplet_map() {
    std::vector<ScalarField> comps;
    comps.push_back(make_field(
        2, [](std::span<const double> u) { return 0.25 * (sq(u[0]) - sq(u[1])); },
        [](std::span<const double> u, std::span<double> g) {
            g[0] = 0.5 * u[0];
            g[1] = -0.5 * u[1];
        }));
    comps.push_back(make_field(
        2, [](std::span<const double> u) { return 0.25 * (sq(u[0]) + sq(u[1])); },
        [](std::span<const double> u, std::span<double> g) {
            g[0] = 0.5 * u[0];
            g[1] = 0.5 * u[1];
        }));
    comps.push_back(make_field(
        2, [](std::span<const double> u) { return 0.5 * u[0] * u[1]; },
        [](std::span<const double> u, std::span<double> g) {
            g[0] = 0.5 * u[1];
            g[1] = 0.5 * u[0];
        }));
    auto map = make_variable_map(doublet_layout(1), std::move(comps));
    // Principal branch: q >= 0; the sign of p follows from z = qp/2.
    map.inverse_hint = [](std::span<const double> w) {
        const double qq = 2.0 * (w[1] + w[0]);
        const double pp = 2.0 * (w[1] - w[0]);
        std::vector<double> u(2);
        if (qq > pp) {
            u[0] = std::sqrt(std::max(qq, 0.0));
            u[1] = u[0] > 0.0 ? 2.0 * w[2] / u[0] : 0.0;
        } else {
            u[1] = std::sqrt(std::max(pp, 0.0));
            u[0] = u[1] > 0.0 ? 2.0 * w[2] / u[1] : 0.0;
        }
        return u;
    };
    return map;
}

ScalarField quadratic_constraint() {
    return make_field(
        3,
        [](std::span<const double> w) {
            return 0.5 * (sq(w[0]) - sq(w[1]) + sq(w[2]));
        },
        [](std::span<const double> w, std::span<double> g) {
            g[0] = w[0];
            g[1] = -w[1];
            g[2] = w[2];
        });
}

BranchSolver quadratic_branches() {
    BranchSolver solver;
    solver.solved_indices = {2};
    for (const double sign : {1.0, -1.0}) {
        solver.branches.push_back([sign](std::span<double> w) {
            const double zz = std::max((w[1] - w[0]) * (w[1] + w[0]), 0.0);
            w[2] = sign * std::sqrt(zz);
        });
    }
    return solver;
}

BuiltinBundle oscillator_triplet(std::string name, double mass, double freq) {
    if (mass <= 0.0) throw std::invalid_argument("non-positive mass");
    if (freq <= 0.0) throw std::invalid_argument("non-positive frequency");
    BuiltinBundle b;
    b.name = std::move(name);
    const double kin = 1.0 / mass, pot = mass * freq * freq;
    b.hamiltonian_system = make_hamiltonian_system(
        1, make_field(
               2,
               [kin, pot](std::span<const double> u) {
                   return 0.5 * kin * sq(u[1]) + 0.5 * pot * sq(u[0]);
               },
               [kin, pot](std::span<const double> u, std::span<double> g) {
                   g[0] = pot * u[0];
                   g[1] = kin * u[1];
               }));
    b.map = quadratic_triplet_map();
    // H = (1/m + m w^2) y + (m w^2 - 1/m) x under the triplet map.
    const double cy = kin + pot, cx = pot - kin;
    auto H = make_field(
        3, [cx, cy](std::span<const double> w) { return cx * w[0] + cy * w[1]; },
        [cx, cy](std::span<const double>, std::span<double> g) {
            g[0] = cx;
            g[1] = cy;
            g[2] = 0.0;
        });
    b.nambu = make_nambu_system(multiplet_layout(1, 3), std::move(H),
                                {quadratic_constraint()});
    b.branches = quadratic_branches();
    return b;
}

// -----------------------------------------------------------------------------
// Example (b): the quartet x1 = q, x2 = p, x3 = q^2 + p, x4 = qp with graph
// constraints x3 - x1^2 - x2 and x4 - x1 x2.
// -----------------------------------------------------------------------------

BuiltinBundle quartet_bundle() {
    BuiltinBundle b;
    b.name = "quartet-ex-b";
    b.hamiltonian_system = make_hamiltonian_system(
        1, make_field(
               2,
               [](std::span<const double> u) { return 0.5 * (sq(u[0]) + sq(u[1])); },
               [](std::span<const double> u, std::span<double> g) {
                   g[0] = u[0];
                   g[1] = u[1];
               }));
    std::vector<ScalarField> comps;
    comps.push_back(coordinate_field(2, 0));
    comps.push_back(coordinate_field(2, 1));
    comps.push_back(make_field(
        2, [](std::span<const double> u) { return sq(u[0]) + u[1]; },
        [](std::span<const double> u, std::span<double> g) {
            g[0] = 2.0 * u[0];
            g[1] = 1.0;
        }));
    comps.push_back(make_field(
        2, [](std::span<const double> u) { return u[0] * u[1]; },
        [](std::span<const double> u, std::span<double> g) {
            g[0] = u[1];
            g[1] = u[0];
        }));
    b.map = make_variable_map(doublet_layout(1), std::move(comps));
    b.map.inverse_hint = [](std::span<const double> w) {
        return std::vector<double>{w[0], w[1]};
    };

    auto H = make_field(
        4, [](std::span<const double> w) { return 0.5 * (sq(w[0]) + sq(w[1])); },
        [](std::span<const double> w, std::span<double> g) {
            zero(g);
            g[0] = w[0];
            g[1] = w[1];
        });
    auto G1 = make_field(
        4, [](std::span<const double> w) { return w[2] - sq(w[0]) - w[1]; },
        [](std::span<const double> w, std::span<double> g) {
            g[0] = -2.0 * w[0];
            g[1] = -1.0;
            g[2] = 1.0;
            g[3] = 0.0;
        });
    auto G2 = make_field(
        4, [](std::span<const double> w) { return w[3] - w[0] * w[1]; },
        [](std::span<const double> w, std::span<double> g) {
            g[0] = -w[1];
            g[1] = -w[0];
            g[2] = 0.0;
            g[3] = 1.0;
        });
    b.nambu = make_nambu_system(multiplet_layout(1, 4), std::move(H),
                                {std::move(G1), std::move(G2)});

    BranchSolver solver;
    solver.solved_indices = {2, 3};
    solver.branches.push_back([](std::span<double> w) {
        w[2] = sq(w[0]) + w[1];
        w[3] = w[0] * w[1];
    });
    b.branches = std::move(solver);
    return b;
}

// -----------------------------------------------------------------------------
// Relativistic free particle, gauge-fixed to three doublets (Q^i, P_i) with
// K = -c P_0 on the solved branch. Chart coordinate order interleaves pairs:
// (Q^1, P_1, Q^2, P_2, Q^3, P_3); w-space order is (X_1..X_3, Y_1..Y_3, Z).
// -----------------------------------------------------------------------------

double momentum_sq(std::span<const double> u) {
    return sq(u[1]) + sq(u[3]) + sq(u[5]);
}

ScalarField reduced_energy(double m, double c, double branch_sign) {
    const double m2c2 = m * m * c * c;
    // K = -c P_0 with P_0 = branch_sign * sqrt(P^2 + m^2 c^2).
    return make_field(
        6,
        [c, m2c2, branch_sign](std::span<const double> u) {
            return -c * branch_sign * std::sqrt(momentum_sq(u) + m2c2);
        },
        [c, m2c2, branch_sign](std::span<const double> u, std::span<double> g) {
            const double root = std::sqrt(momentum_sq(u) + m2c2);
            zero(g);
            for (int i = 0; i < 3; ++i) g[2 * i + 1] = -c * branch_sign * u[2 * i + 1] / root;
        });
}

ScalarField p0_of_momenta(double m, double c, double branch_sign) {
    const double m2c2 = m * m * c * c;
    return make_field(
        6,
        [m2c2, branch_sign](std::span<const double> u) {
            return branch_sign * std::sqrt(momentum_sq(u) + m2c2);
        },
        [m2c2, branch_sign](std::span<const double> u, std::span<double> g) {
            const double root = std::sqrt(momentum_sq(u) + m2c2);
            zero(g);
            for (int i = 0; i < 3; ++i) g[2 * i + 1] = branch_sign * u[2 * i + 1] / root;
        });
}

std::function<void(std::span<const double>, std::span<double>)> constant_symplectic_metric() {
    // g_ab = (delta_{a,b-3} - delta_{a-3,b}) / 2 over the 6 x-coordinates.
    return [](std::span<const double>, std::span<double> g) {
        zero(g);
        for (int i = 0; i < 3; ++i) {
            g[i * 6 + (i + 3)] = 0.5;
            g[(i + 3) * 6 + i] = -0.5;
        }
    };
}

BuiltinBundle relativistic_bundle(char variant, const BuiltinParams& params) {
    const double m = params.mass, c = params.light_speed;
    if (m <= 0.0) throw std::invalid_argument("non-positive mass");
    if (c <= 0.0) throw std::invalid_argument("non-positive light speed");
    const double m2c2 = m * m * c * c;

    BuiltinBundle b;
    b.name = std::string("relativistic-") + variant;
    const auto reduction = gauge_reduce_relativistic(params);
    b.hamiltonian_system = reduction.reduced;
    b.constraint_spec = reduction.spec;

    const double branch_sign = -1.0;
    std::vector<ScalarField> comps;
    if (variant == 'c') {
        // X_i = 2 P_0 Q^i.
        for (int i = 0; i < 3; ++i) {
            comps.push_back(make_field(
                6,
                [i, m2c2, branch_sign](std::span<const double> u) {
                    const double p0 = branch_sign * std::sqrt(momentum_sq(u) + m2c2);
                    return 2.0 * p0 * u[2 * i];
                },
                [i, m2c2, branch_sign](std::span<const double> u, std::span<double> g) {
                    const double p0 = branch_sign * std::sqrt(momentum_sq(u) + m2c2);
                    zero(g);
                    g[2 * i] = 2.0 * p0;
                    for (int j = 0; j < 3; ++j)
                        g[2 * j + 1] = 2.0 * u[2 * i] * u[2 * j + 1] / p0;
                }));
        }
    } else {
        for (int i = 0; i < 3; ++i) comps.push_back(coordinate_field(6, 2 * i));
    }
    for (int i = 0; i < 3; ++i) comps.push_back(coordinate_field(6, 2 * i + 1));
    if (variant == 'b') {
        // Z = P_0^2 = P^2 + m^2 c^2 on the constraint surface.
        comps.push_back(make_field(
            6, [m2c2](std::span<const double> u) { return momentum_sq(u) + m2c2; },
            [](std::span<const double> u, std::span<double> g) {
                zero(g);
                for (int i = 0; i < 3; ++i) g[2 * i + 1] = 2.0 * u[2 * i + 1];
            }));
    } else {
        comps.push_back(p0_of_momenta(m, c, branch_sign));
    }
    b.map = make_variable_map(doublet_layout(3), std::move(comps));
    if (variant == 'c') {
        b.map.inverse_hint = [](std::span<const double> w) {
            std::vector<double> u(6);
            for (int i = 0; i < 3; ++i) {
                u[2 * i] = w[i] / (2.0 * w[6]);
                u[2 * i + 1] = w[3 + i];
            }
            return u;
        };
    } else {
        b.map.inverse_hint = [](std::span<const double> w) {
            std::vector<double> u(6);
            for (int i = 0; i < 3; ++i) {
                u[2 * i] = w[i];
                u[2 * i + 1] = w[3 + i];
            }
            return u;
        };
    }

    const auto y_norm_sq = [](std::span<const double> w) {
        return sq(w[3]) + sq(w[4]) + sq(w[5]);
    };

    ScalarField H, G;
    if (variant == 'b') {
        H = make_field(
            7, [c](std::span<const double> w) { return c * std::sqrt(w[6]); },
            [c](std::span<const double> w, std::span<double> g) {
                zero(g);
                g[6] = 0.5 * c / std::sqrt(w[6]);
            });
        G = make_field(
            7, [m2c2, y_norm_sq](std::span<const double> w) { return w[6] - y_norm_sq(w) - m2c2; },
            [](std::span<const double> w, std::span<double> g) {
                zero(g);
                for (int i = 0; i < 3; ++i) g[3 + i] = -2.0 * w[3 + i];
                g[6] = 1.0;
            });
    } else {
        H = make_field(
            7, [c](std::span<const double> w) { return -c * w[6]; },
            [c](std::span<const double>, std::span<double> g) {
                zero(g);
                g[6] = -c;
            });
        if (variant == 'a') {
            G = make_field(
                7,
                [m2c2, y_norm_sq](std::span<const double> w) {
                    return w[6] + std::sqrt(y_norm_sq(w) + m2c2);
                },
                [m2c2, y_norm_sq](std::span<const double> w, std::span<double> g) {
                    const double root = std::sqrt(y_norm_sq(w) + m2c2);
                    zero(g);
                    for (int i = 0; i < 3; ++i) g[3 + i] = w[3 + i] / root;
                    g[6] = 1.0;
                });
        } else {
            G = make_field(
                7,
                [m2c2, y_norm_sq](std::span<const double> w) {
                    return sq(w[6]) - y_norm_sq(w) - m2c2;
                },
                [](std::span<const double> w, std::span<double> g) {
                    zero(g);
                    for (int i = 0; i < 3; ++i) g[3 + i] = -2.0 * w[3 + i];
                    g[6] = 2.0 * w[6];
                });
        }
    }

    GeneralizedBlock block;
    block.x_indices = {0, 1, 2, 3, 4, 5};
    block.z_indices = {6};
    block.constraints = {G};
    if (variant == 'c') {
        block.metric = [](std::span<const double> w, std::span<double> g) {
            zero(g);
            const double z2 = sq(w[6]);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    g[i * 6 + j] = -(w[i] * w[3 + j] - w[j] * w[3 + i]) / (2.0 * z2);
            for (int i = 0; i < 3; ++i) {
                g[i * 6 + (i + 3)] = 0.5;
                g[(i + 3) * 6 + i] = -0.5;
            }
        };
    } else {
        block.metric = constant_symplectic_metric();
    }

    GeneralizedNambuSystem gsys;
    gsys.dim = 7;
    gsys.hamiltonian = std::move(H);
    gsys.blocks = {std::move(block)};
    b.generalized = std::move(gsys);
    return b;
}

} // namespace

// =============================================================================
// Public constructors
// =============================================================================

std::vector<std::string> builtin_names() {
    return {"quadratic-triplet",  "quartet-ex-b",   "harmonic-oscillator-triplet",
            "relativistic-a",     "relativistic-b", "relativistic-c"};
}

BuiltinBundle make_builtin(std::string_view name, const BuiltinParams& params) {
    if (name == "quadratic-triplet") return oscillator_triplet("quadratic-triplet", 1.0, 1.0);
    if (name == "harmonic-oscillator-triplet")
        return oscillator_triplet("harmonic-oscillator-triplet", params.mass,
                                  params.frequency);
    if (name == "quartet-ex-b") return quartet_bundle();
    if (name == "relativistic-a") return relativistic_bundle('a', params);
    if (name == "relativistic-b") return relativistic_bundle('b', params);
    if (name == "relativistic-c") return relativistic_bundle('c', params);
    throw std::invalid_argument("unknown built-in system: " + std::string(name));
}

RelativisticReduction gauge_reduce_relativistic(const BuiltinParams& params,
                                                EnergyBranch branch) {
    const double m = params.mass, c = params.light_speed;
    if (m <= 0.0) throw std::invalid_argument("non-positive mass");
    if (c <= 0.0) throw std::invalid_argument("non-positive light speed");
    const double m2c2 = m * m * c * c;
    const double sign = branch == EnergyBranch::negative_p0 ? -1.0 : 1.0;

    RelativisticReduction red;
    red.branch = branch;
    red.reduced = make_hamiltonian_system(3, reduced_energy(m, c, sign));

    // Original chart (q^0, p_0, q^1, p_1, q^2, p_2, q^3, p_3), metric (+,-,-,-).
    ConstraintSpec spec;
    spec.chart = doublet_layout(4);
    spec.phi.push_back(make_field(
        8,
        [m2c2](std::span<const double> u) {
            return sq(u[1]) - sq(u[3]) - sq(u[5]) - sq(u[7]) - m2c2;
        },
        [](std::span<const double> u, std::span<double> g) {
            zero(g);
            g[1] = 2.0 * u[1];
            for (int i = 1; i < 4; ++i) g[2 * i + 1] = -2.0 * u[2 * i + 1];
        }));
    spec.chi.push_back(coordinate_field(8, 0)); // chi = q^0 - c tau; tau is a parameter
    red.spec = std::move(spec);

    red.Phi = make_field(
        8,
        [m2c2](std::span<const double> u) {
            return sq(u[1]) - sq(u[3]) - sq(u[5]) - sq(u[7]) - m2c2;
        },
        [](std::span<const double> u, std::span<double> g) {
            zero(g);
            g[1] = 2.0 * u[1];
            for (int i = 1; i < 4; ++i) g[2 * i + 1] = -2.0 * u[2 * i + 1];
        });
    red.Psi = make_field(
        8,
        [m2c2, sign](std::span<const double> u) {
            const double root = std::sqrt(sq(u[3]) + sq(u[5]) + sq(u[7]) + m2c2);
            return u[1] - sign * root;
        },
        [m2c2, sign](std::span<const double> u, std::span<double> g) {
            const double root = std::sqrt(sq(u[3]) + sq(u[5]) + sq(u[7]) + m2c2);
            zero(g);
            g[1] = 1.0;
            for (int i = 1; i < 4; ++i) g[2 * i + 1] = -sign * u[2 * i + 1] / root;
        });
    return red;
}

} // namespace nambu
