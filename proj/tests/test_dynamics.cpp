#include "nambu/builtins.hpp"
#include "nambu/dynamics.hpp"
#include "nambu/fields.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace nambu;

namespace {

HamiltonianSystem oscillator() {
    return make_hamiltonian_system(
        1, make_field(
               2,
               [](std::span<const double> u) {
                   return 0.5 * (u[0] * u[0] + u[1] * u[1]);
               },
               [](std::span<const double> u, std::span<double> g) {
                   g[0] = u[0];
                   g[1] = u[1];
               }));
}

} // namespace

TEST_CASE("Hamiltonian right-hand sides") {
    const auto osc = oscillator();
    const auto v = hamiltonian_rhs(osc, std::vector<double>{1.0, 0.0});
    CHECK(v[0] == doctest::Approx(0.0));
    CHECK(v[1] == doctest::Approx(-1.0));

    const auto free_particle = make_hamiltonian_system(
        1, make_field(
               2, [](std::span<const double> u) { return 0.5 * u[1] * u[1]; },
               [](std::span<const double> u, std::span<double> g) {
                   g[0] = 0.0;
                   g[1] = u[1];
               }));
    const auto vf = hamiltonian_rhs(free_particle, std::vector<double>{0.7, 3.0});
    CHECK(vf[0] == doctest::Approx(3.0));
    CHECK(vf[1] == doctest::Approx(0.0));

    const auto red = gauge_reduce_relativistic({});
    const auto vr = hamiltonian_rhs(red.reduced, std::vector<double>{0, 3, 0, 0, 0, 0});
    CHECK(vr[0] == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-12));
    CHECK(std::abs(vr[1]) < 1e-14);
}

TEST_CASE("Nambu right-hand side of the oscillator triplet") {
    const auto bundle = make_builtin("quadratic-triplet");
    const auto v = nambu_rhs(*bundle.nambu, std::vector<double>{0.25, 0.25, 0.0});
    CHECK(std::abs(v[0]) < 1e-14);
    CHECK(std::abs(v[1]) < 1e-14);
    CHECK(v[2] == doctest::Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("parallel Hamiltonian gradients freeze the Nambu flow") {
    // grad H = (0, 2, 0); at x = z = 0 the constraint gradient (x, -y, z) is
    // parallel to it, so every Jacobian row pair is dependent.
    const auto bundle = make_builtin("quadratic-triplet");
    const auto v = nambu_rhs(*bundle.nambu, std::vector<double>{0.0, 0.7, 0.0});
    for (const double c : v) CHECK(std::abs(c) < 1e-14);
}

TEST_CASE("generalized RHS of construction (a) reduces to the Hamilton equations") {
    const auto bundle = make_builtin("relativistic-a");
    const CounterRng rng{41};
    for (int i = 0; i < 30; ++i) {
        std::vector<double> u(6);
        for (int j = 0; j < 6; ++j)
            u[j] = j % 2 == 1 ? rng.uniform(j, i, 0.3, 1.5) : rng.uniform(j, i, -1.5, 1.5);
        const auto w = bundle.map.apply(u);
        const auto vu = hamiltonian_rhs(bundle.hamiltonian_system, u);
        const auto vw = generalized_nambu_rhs(*bundle.generalized, w);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(vw[k] - vu[2 * k]) <= 1e-9);         // dX_i = dQ^i
            CHECK(std::abs(vw[3 + k] - vu[2 * k + 1]) <= 1e-9); // dY_i = dP_i = 0
        }
        CHECK(std::abs(vw[6]) <= 1e-12); // energy conservation: dZ = 0

        // Triplet-sum oracle: the constant metric collapses the double sum to
        // sum_i d(f, H, G)/d(X_i, Y_i, Z).
        for (int l = 0; l < 7; ++l) {
            double expected = 0.0;
            for (int i3 = 0; i3 < 3; ++i3) {
                const ScalarField fields[] = {coordinate_field(7, l),
                                              bundle.generalized->hamiltonian,
                                              bundle.generalized->blocks[0].constraints[0]};
                const int axes[] = {i3, 3 + i3, 6};
                expected += jacobian_determinant(fields, w, axes);
            }
            CHECK(std::abs(vw[l] - expected) <= 1e-12);
        }
    }
}

TEST_CASE("least-action equations match the Nambu flow on the triplet") {
    const auto bundle = make_builtin("quadratic-triplet");
    const auto& H = bundle.nambu->hamiltonian;

    const auto w0 = bundle.map.apply(std::vector<double>{1.0, 0.0});
    const auto v = least_action_rhs(bundle.map, H, w0);
    CHECK(std::abs(v[0]) < 1e-13);
    CHECK(std::abs(v[1]) < 1e-13);
    CHECK(v[2] == doctest::Approx(-0.5).epsilon(1e-12));

    // Constant Hamiltonian: no motion.
    const auto vc = least_action_rhs(bundle.map, constant_field(3, 4.2), w0);
    for (const double c : vc) CHECK(c == 0.0);

    // Equivalence sweep over random states.
    for (const auto& qp : testsup::random_points(42, 100, 2, 0.2, 1.8)) {
        const auto w = bundle.map.apply(qp);
        const auto va = least_action_rhs(bundle.map, H, w);
        const auto vb = nambu_rhs(*bundle.nambu, w);
        CHECK(testsup::sup_diff(va, vb) <= 1e-8);
    }
}

TEST_CASE("least-action requires an inverse and a usable chart") {
    auto bundle = make_builtin("quadratic-triplet");
    const auto H = bundle.nambu->hamiltonian;
    const auto w0 = bundle.map.apply(std::vector<double>{1.0, 0.5});
    bundle.map.inverse_hint = nullptr;
    CHECK_THROWS_AS(least_action_rhs(bundle.map, H, w0), std::runtime_error);

    // All chart Jacobians vanish at the origin of the quadratic map.
    auto origin_map = make_builtin("quadratic-triplet").map;
    origin_map.inverse_hint = [](std::span<const double>) {
        return std::vector<double>{0.0, 0.0};
    };
    CHECK_THROWS_WITH_AS(least_action_rhs(origin_map, H, std::vector<double>{0, 0, 0}),
                         "fully degenerate chart", std::runtime_error);
}

TEST_CASE("RK4 closes a full oscillator period") {
    const long steps = 6283;
    IntegratorConfig cfg;
    cfg.dt = 2.0 * 3.14159265358979323846 / (double)steps;
    cfg.steps = steps;
    const auto traj = integrate(hamiltonian_rhs_field(oscillator()),
                                std::vector<double>{1.0, 0.0}, cfg);
    REQUIRE_FALSE(traj.truncated);
    CHECK(std::abs(traj.states.back()[0] - 1.0) <= 1e-9);
    CHECK(std::abs(traj.states.back()[1]) <= 1e-9);
}

TEST_CASE("zero velocity field keeps the state constant") {
    VelocityField rhs;
    rhs.dim = 2;
    rhs.eval = [](std::span<const double>, std::span<double> v) { v[0] = v[1] = 0.0; };
    IntegratorConfig cfg;
    cfg.steps = 50;
    const auto traj = integrate(rhs, std::vector<double>{0.3, -0.7}, cfg);
    for (const auto& s : traj.states) {
        CHECK(s[0] == 0.3);
        CHECK(s[1] == -0.7);
    }
}

TEST_CASE("constraint and energy diagnostics stay flat along the Nambu flow") {
    const auto bundle = make_builtin("quadratic-triplet");
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.steps = 10000;
    const auto obs = nambu_observables(*bundle.nambu);
    const auto start = bundle.map.apply(std::vector<double>{1.0, 0.0});
    const auto traj = integrate(nambu_rhs_field(*bundle.nambu), start, cfg, obs);
    REQUIRE_FALSE(traj.truncated);
    double gmax = 0.0, hdrift = 0.0;
    const double h0 = traj.diagnostics.front()[1];
    for (const auto& d : traj.diagnostics) {
        gmax = std::max(gmax, std::abs(d[0]));
        hdrift = std::max(hdrift, std::abs(d[1] - h0));
    }
    CHECK(gmax <= 1e-8);
    CHECK(hdrift <= 1e-8);
}

TEST_CASE("integration truncates on blow-up instead of emitting garbage") {
    VelocityField rhs;
    rhs.dim = 1;
    rhs.eval = [](std::span<const double> x, std::span<double> v) { v[0] = x[0] * x[0]; };
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.steps = 200; // blow-up of dx/dt = x^2 from 1 is at t = 1
    const auto traj = integrate(rhs, std::vector<double>{1.0}, cfg);
    CHECK(traj.truncated);
    CHECK(!traj.error.empty());
    CHECK(traj.size() < 201);
    for (const auto& s : traj.states) CHECK(std::isfinite(s[0]));
}

TEST_CASE("invalid integrator configuration is rejected") {
    IntegratorConfig cfg;
    cfg.dt = -1.0;
    VelocityField rhs;
    rhs.dim = 1;
    rhs.eval = [](std::span<const double>, std::span<double> v) { v[0] = 0.0; };
    CHECK_THROWS_AS(integrate(rhs, std::vector<double>{0.0}, cfg), std::invalid_argument);
}

TEST_CASE("RK4 is fourth order against the analytic oscillator") {
    auto error_at = [&](double dt) {
        IntegratorConfig cfg;
        cfg.dt = dt;
        cfg.steps = (long)std::lround(2.0 / dt);
        const auto traj = integrate(hamiltonian_rhs_field(oscillator()),
                                    std::vector<double>{1.0, 0.0}, cfg);
        const double t = traj.times.back();
        const double eq = traj.states.back()[0] - std::cos(t);
        const double ep = traj.states.back()[1] + std::sin(t);
        return std::sqrt(eq * eq + ep * ep);
    };
    const double ratio = error_at(0.05) / error_at(0.025);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("explicit Euler is available and first order") {
    auto error_at = [&](double dt) {
        IntegratorConfig cfg;
        cfg.method = IntegratorConfig::Method::explicit_euler;
        cfg.dt = dt;
        cfg.steps = (long)std::lround(1.0 / dt);
        const auto traj = integrate(hamiltonian_rhs_field(oscillator()),
                                    std::vector<double>{1.0, 0.0}, cfg);
        return std::abs(traj.states.back()[0] - std::cos(1.0));
    };
    const double ratio = error_at(0.002) / error_at(0.001);
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
}

// =============================================================================
// Tangent flow
// =============================================================================

TEST_CASE("Nambu flow preserves phase-space volume") {
    const auto bundle = make_builtin("quadratic-triplet");
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.variational = true;
    const auto start = bundle.map.apply(std::vector<double>{1.0, 0.0});
    const double det =
        flow_volume_jacobian(nambu_rhs_field(*bundle.nambu), start, 10.0, cfg);
    CHECK(std::abs(det - 1.0) <= 1e-6);
}

TEST_CASE("symplectic flow has unit volume Jacobian") {
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.variational = true;
    const double det = flow_volume_jacobian(hamiltonian_rhs_field(oscillator()),
                                            std::vector<double>{1.0, 0.0}, 10.0, cfg);
    CHECK(std::abs(det - 1.0) <= 1e-8);
}

TEST_CASE("contracting control flow reproduces the analytic volume decay") {
    VelocityField rhs;
    rhs.dim = 1;
    rhs.eval = [](std::span<const double> x, std::span<double> v) { v[0] = -x[0]; };
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.variational = true;
    const double det = flow_volume_jacobian(rhs, std::vector<double>{1.0}, 1.0, cfg);
    CHECK(std::abs(det - std::exp(-1.0)) <= 1e-6);

    // Same result through an exact Jacobian callback.
    rhs.jacobian = [](std::span<const double>, std::span<double> j) { j[0] = -1.0; };
    const double det2 = flow_volume_jacobian(rhs, std::vector<double>{1.0}, 1.0, cfg);
    CHECK(std::abs(det2 - std::exp(-1.0)) <= 1e-9);

    IntegratorConfig plain;
    CHECK_THROWS_AS(flow_volume_jacobian(rhs, std::vector<double>{1.0}, 1.0, plain),
                    std::invalid_argument);
}

// =============================================================================
// CSV round trip
// =============================================================================

TEST_CASE("trajectory CSV round-trips bit-exactly") {
    const auto bundle = make_builtin("quadratic-triplet");
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.steps = 57;
    cfg.variational = true;
    const auto start = bundle.map.apply(std::vector<double>{0.9, 0.3});
    const auto obs = nambu_observables(*bundle.nambu);
    const auto traj = integrate(nambu_rhs_field(*bundle.nambu), start, cfg, obs);

    const auto path = std::filesystem::temp_directory_path() / "nambu_traj_roundtrip.csv";
    write_trajectory_csv(traj, path.string());
    const auto back = read_trajectory_csv(path.string());
    std::filesystem::remove(path);

    REQUIRE(back.size() == traj.size());
    REQUIRE(back.diagnostic_names == traj.diagnostic_names);
    for (long s = 0; s < traj.size(); ++s) {
        CHECK(back.times[s] == traj.times[s]);
        for (size_t i = 0; i < traj.states[s].size(); ++i)
            CHECK(back.states[s][i] == traj.states[s][i]);
        for (size_t i = 0; i < traj.diagnostics[s].size(); ++i)
            CHECK(back.diagnostics[s][i] == traj.diagnostics[s][i]);
    }
}
