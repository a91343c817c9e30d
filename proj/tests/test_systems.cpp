#include "nambu/brackets.hpp"
#include "nambu/builtins.hpp"
#include "nambu/conjugate.hpp"
#include "nambu/dynamics.hpp"
#include "nambu/fields.hpp"
#include "nambu/verify.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace nambu;

TEST_CASE("quadratic triplet maps the rest point of the oscillator") {
    const auto bundle = make_builtin("quadratic-triplet");
    const auto w = bundle.map.apply(std::vector<double>{1.0, 0.0});
    CHECK(w[0] == doctest::Approx(0.25));
    CHECK(w[1] == doctest::Approx(0.25));
    CHECK(w[2] == doctest::Approx(0.0));
}

TEST_CASE("induced constraint vanishes identically along the embedded surface") {
    // x^2 + z^2 = y^2 holds for every chart point, so G = (x^2 - y^2 + z^2)/2
    // evaluates to zero wherever the map can reach.
    const auto bundle = make_builtin("quadratic-triplet");
    for (const auto& qp : testsup::random_points(21, 200, 2, -3.0, 3.0)) {
        const auto w = bundle.map.apply(qp);
        CHECK(std::abs(bundle.nambu->constraints[0].eval(w)) < 1e-12);
    }
}

TEST_CASE("relativistic constraint vanishes on the solved branch") {
    const auto bundle = make_builtin("relativistic-a");
    for (const auto& u : testsup::random_points(22, 50, 6, -1.5, 1.5)) {
        const auto w = bundle.map.apply(u); // fills Z = -sqrt(P^2 + m^2 c^2)
        CHECK(std::abs(bundle.generalized->blocks[0].constraints[0].eval(w)) < 1e-12);
    }
    const auto red = gauge_reduce_relativistic({});
    // transformed chart (Q^0, P_0, ..., Q^3, P_3) with P_0 on the branch
    std::vector<double> t{0.0, -std::sqrt(1.0 + 14.0), 1.0, 1.0, 2.0, 2.0, 3.0, 3.0};
    CHECK(std::abs(red.Psi.eval(t)) < 1e-12);
    CHECK(std::abs(red.Phi.eval(t)) < 1e-12);
}

TEST_CASE("builtin construction rejects bad input") {
    CHECK_THROWS_AS(make_builtin("no-such-system"), std::invalid_argument);
    BuiltinParams bad;
    bad.mass = -1.0;
    CHECK_THROWS_AS(make_builtin("harmonic-oscillator-triplet", bad), std::invalid_argument);
    bad.mass = 1.0;
    bad.light_speed = 0.0;
    CHECK_THROWS_AS(make_builtin("relativistic-a", bad), std::invalid_argument);
}

TEST_CASE("map inverse hint is a section of the map") {
    const auto bundle = make_builtin("quadratic-triplet");
    for (const auto& qp : testsup::random_points(23, 100, 2, -2.0, 2.0)) {
        const auto w = bundle.map.apply(qp);
        const auto back = bundle.map.inverse_hint(w);
        const auto w2 = bundle.map.apply(back);
        CHECK(testsup::sup_diff(w, w2) < 1e-10);
    }
}

TEST_CASE("map nondegeneracy: at least N-1 pairwise brackets are nonzero") {
    const auto bundle = make_builtin("quadratic-triplet");
    for (const auto& qp : testsup::random_points(24, 50, 2, 0.4, 1.6)) {
        int nonzero = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (std::abs(map_pair_bracket(bundle.map, i, j, qp)) > 1e-10) ++nonzero;
        CHECK(nonzero >= 2);
    }
}

// =============================================================================
// Induced-constraint conditions
// =============================================================================

TEST_CASE("induced-constraint conditions hold for the quadratic triplet") {
    const auto bundle = make_builtin("quadratic-triplet");
    const auto points = testsup::random_points(25, 100, 2, -2.0, 2.0);
    CHECK(verify_induced_constraints(bundle.map, bundle.nambu->constraints, points) <=
          1e-10);
}

namespace {

// Raw tuple-enumeration oracle for the quartet conditions: for each index pair
// sums eps_{i1 i2 i3 i4} dG1/dx_{i3} dG2/dx_{i4} over all (i3, i4) directly.
double quartet_conditions_bruteforce(const BuiltinBundle& b,
                                     std::span<const double> qp) {
    const auto w = b.map.apply(qp);
    const auto g1 = gradient(b.nambu->constraints[0], w);
    const auto g2 = gradient(b.nambu->constraints[1], w);
    double worst = 0.0;
    for (int i1 = 0; i1 < 4; ++i1)
        for (int i2 = i1 + 1; i2 < 4; ++i2) {
            double lhs = 0.0;
            for (int i3 = 0; i3 < 4; ++i3)
                for (int i4 = 0; i4 < 4; ++i4) {
                    const int idx[] = {i1, i2, i3, i4};
                    const int sign = permutation_sign(idx);
                    if (sign != 0) lhs += sign * g1[i3] * g2[i4];
                }
            const double rhs = map_pair_bracket(b.map, i1, i2, qp);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    return worst;
}

} // namespace

TEST_CASE("induced-constraint conditions hold for the quartet") {
    const auto bundle = make_builtin("quartet-ex-b");
    const auto points = testsup::random_points(26, 20, 2, -2.0, 2.0);
    CHECK(verify_induced_constraints(bundle.map, bundle.nambu->constraints, points) <= 1e-8);
    for (const auto& qp : points)
        CHECK(quartet_conditions_bruteforce(bundle, qp) <= 1e-8);
}

TEST_CASE("wrong constraint candidates are rejected loudly") {
    const auto bundle = make_builtin("quadratic-triplet");
    const ScalarField wrong[] = {coordinate_field(3, 1)}; // candidate G = y
    const auto points = testsup::random_points(27, 50, 2, 0.6, 1.6);
    CHECK(verify_induced_constraints(bundle.map, wrong, points) >= 0.1);

    const auto quartet = make_builtin("quartet-ex-b");
    const ScalarField wrong2[] = {coordinate_field(4, 2), quartet.nambu->constraints[1]};
    CHECK(verify_induced_constraints(quartet.map, wrong2, points) >= 0.1);
}

TEST_CASE("image-space check needs the inverse hint") {
    auto bundle = make_builtin("quadratic-triplet");
    const auto points = testsup::random_points(28, 5, 2, 0.5, 1.5);
    std::vector<std::vector<double>> image;
    for (const auto& qp : points) image.push_back(bundle.map.apply(qp));

    CHECK(verify_induced_constraints_at_image(bundle.map, bundle.nambu->constraints,
                                              image) <= 1e-10);
    bundle.map.inverse_hint = nullptr;
    CHECK_THROWS_WITH_AS(verify_induced_constraints_at_image(
                             bundle.map, bundle.nambu->constraints, image),
                         "constraint check needs inverse or embedding", std::runtime_error);
}

// =============================================================================
// Constraint constancy
// =============================================================================

TEST_CASE("pulled-back constraints commute with arbitrary probes") {
    const auto bundle = make_builtin("quadratic-triplet");
    const auto points = testsup::random_points(29, 60, 2, -2.0, 2.0);

    std::vector<ScalarField> probes;
    probes.push_back(coordinate_field(2, 0)); // q
    probes.push_back(coordinate_field(2, 1)); // p
    probes.push_back(field_product(coordinate_field(2, 0), coordinate_field(2, 1)));
    probes.push_back(field_product(coordinate_field(2, 0), coordinate_field(2, 0)));

    CHECK(verify_constraint_constancy(bundle.nambu->constraints[0], probes, bundle.map,
                                      points) <= 1e-10);

    const auto quartet = make_builtin("quartet-ex-b");
    std::vector<ScalarField> random_probes;
    for (int i = 0; i < 5; ++i)
        random_probes.push_back(testsup::random_quadratic(2, 900 + i));
    CHECK(verify_constraint_constancy(quartet.nambu->constraints[0], random_probes,
                                      quartet.map, points) <= 1e-8);
    CHECK(verify_constraint_constancy(quartet.nambu->constraints[1], random_probes,
                                      quartet.map, points) <= 1e-8);
}

TEST_CASE("a constraint probed against itself gives zero by antisymmetry") {
    const auto bundle = make_builtin("quadratic-triplet");
    const auto pulled = pullback_to_chart(bundle.nambu->constraints[0], bundle.map);
    const ScalarField probes[] = {pulled};
    const auto points = testsup::random_points(30, 20, 2, -2.0, 2.0);
    CHECK(verify_constraint_constancy(bundle.nambu->constraints[0], probes, bundle.map,
                                      points) <= 1e-15);
}

TEST_CASE("induced conditions imply constancy") {
    // Whenever the condition residual is small, so is every probe bracket.
    for (const char* name : {"quadratic-triplet", "quartet-ex-b"}) {
        const auto bundle = make_builtin(name);
        const auto points = testsup::random_points(31, 40, 2, -1.5, 1.5);
        const double cond =
            verify_induced_constraints(bundle.map, bundle.nambu->constraints, points);
        REQUIRE(cond <= 1e-8);
        std::vector<ScalarField> probes;
        for (int i = 0; i < 4; ++i) probes.push_back(testsup::random_quadratic(2, 950 + i));
        for (const auto& g : bundle.nambu->constraints)
            CHECK(verify_constraint_constancy(g, probes, bundle.map, points) <= 1e-7);
    }
}

// =============================================================================
// Gauge terms
// =============================================================================

TEST_CASE("adding lambda G to the Hamiltonian leaves the flow unchanged on shell") {
    const auto bundle = make_builtin("quadratic-triplet");
    NambuSystem plain = *bundle.nambu;
    NambuSystem gauged = plain;
    gauged.gauge_terms = {testsup::random_quadratic(3, 77)};

    for (const auto& qp : testsup::random_points(32, 50, 2, -2.0, 2.0)) {
        const auto w = bundle.map.apply(qp); // on-constraint state
        const auto v0 = nambu_rhs(plain, w);
        const auto v1 = nambu_rhs(gauged, w);
        CHECK(testsup::sup_diff(v0, v1) <= 1e-9);
    }
}

// =============================================================================
// Generalized conditions and metric
// =============================================================================

namespace {

std::vector<std::vector<double>> relativistic_points(std::uint64_t seed, int count) {
    // Q free, momenta away from zero so the branch root is well separated.
    const CounterRng rng{seed};
    std::vector<std::vector<double>> pts(count, std::vector<double>(6));
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < 6; ++j) {
            const bool momentum = j % 2 == 1;
            pts[i][j] = momentum ? rng.uniform(j, i, 0.3, 1.5) : rng.uniform(j, i, -1.5, 1.5);
        }
    return pts;
}

} // namespace

TEST_CASE("generalized condition families hold for the relativistic constructions") {
    const auto points = relativistic_points(33, 60);
    for (const char* name : {"relativistic-a", "relativistic-b", "relativistic-c"}) {
        const auto bundle = make_builtin(name);
        const auto res =
            verify_generalized_conditions(*bundle.generalized, bundle.map, points);
        INFO(name);
        CHECK(res.xx <= (name[13] == 'c' ? 1e-8 : 1e-10));
        CHECK(res.xz <= 1e-8);
        CHECK(res.zz <= 1e-12); // m = 1: family is empty
    }
}

TEST_CASE("m = 0 reduces the conditions to the metric definition") {
    // Map x1 = q, x2 = p (1 + q^2): the bracket {x1, x2} = 1 + x1^2 defines
    // the metric, which then satisfies the (x,x) family by construction.
    std::vector<ScalarField> comps;
    comps.push_back(coordinate_field(2, 0));
    comps.push_back(make_field(
        2, [](std::span<const double> u) { return u[1] * (1.0 + u[0] * u[0]); },
        [](std::span<const double> u, std::span<double> g) {
            g[0] = 2.0 * u[0] * u[1];
            g[1] = 1.0 + u[0] * u[0];
        }));
    const auto map = make_variable_map(doublet_layout(1), std::move(comps));

    GeneralizedBlock block;
    block.x_indices = {0, 1};
    block.metric = [](std::span<const double> w, std::span<double> g) {
        const double v = 0.5 * (1.0 + w[0] * w[0]);
        g[0] = 0.0;
        g[1] = v;
        g[2] = -v;
        g[3] = 0.0;
    };
    GeneralizedNambuSystem gsys;
    gsys.dim = 2;
    gsys.hamiltonian = testsup::random_quadratic(2, 88);
    gsys.blocks = {block};

    const auto points = testsup::random_points(34, 50, 2, -1.5, 1.5);
    const auto res = verify_generalized_conditions(gsys, map, points);
    CHECK(res.xx <= 1e-10);
    CHECK(res.xz == 0.0);
    CHECK(res.zz == 0.0);
}

TEST_CASE("degenerate z-block is reported") {
    auto bundle = make_builtin("relativistic-a");
    // Replace the constraint by one that ignores Z entirely.
    bundle.generalized->blocks[0].constraints[0] = coordinate_field(7, 3);
    const auto points = relativistic_points(35, 3);
    CHECK_THROWS_WITH_AS(
        verify_generalized_conditions(*bundle.generalized, bundle.map, points),
        "degenerate z-block", std::runtime_error);
}

TEST_CASE("construction (c) metric matches the bracket-determined one") {
    const auto bundle = make_builtin("relativistic-c");
    const auto points = relativistic_points(36, 100);
    for (const auto& u : points) {
        const auto w = bundle.map.apply(u);
        const auto closed_form = block_metric(bundle.generalized->blocks[0], w);
        const auto from_conditions =
            metric_from_conditions(*bundle.generalized, bundle.map, 0, u);
        CHECK(testsup::sup_diff(closed_form, from_conditions) <= 1e-10);
    }
}

TEST_CASE("metric transformation law") {
    const int d = 2;
    const MetricField base = [](std::span<const double>, std::span<double> g) {
        g[0] = 0.0;
        g[1] = 0.5;
        g[2] = -0.5;
        g[3] = 0.0;
    };

    SUBCASE("identity change keeps the metric") {
        const ScalarField change[] = {coordinate_field(d, 0), coordinate_field(d, 1)};
        const auto g = metric_pullback(base, change, std::vector<double>{0.7, -0.3});
        CHECK(g[1] == doctest::Approx(0.5));
        CHECK(g[2] == doctest::Approx(-0.5));
    }

    SUBCASE("uniform scaling is quadratic in the Jacobian") {
        const ScalarField change[] = {field_scaled(coordinate_field(d, 0), 2.0),
                                      field_scaled(coordinate_field(d, 1), 2.0)};
        const auto g = metric_pullback(base, change, std::vector<double>{0.7, -0.3});
        CHECK(g[1] == doctest::Approx(2.0));
        CHECK(g[2] == doctest::Approx(-2.0));
    }

    SUBCASE("random smooth change agrees with the directly computed bracket") {
        // Base variables are the chart itself, so g = {x_a, x_b}/2 = 1/2. The
        // transformed metric must equal {x'_a, x'_b}_PB/2 computed from the
        // chart composition.
        const double a = 0.37, b = 0.21;
        const ScalarField change[] = {
            make_field(
                2, [a](std::span<const double> x) { return x[0] + a * x[1] * x[1]; },
                [a](std::span<const double> x, std::span<double> g) {
                    g[0] = 1.0;
                    g[1] = 2.0 * a * x[1];
                }),
            make_field(
                2, [b](std::span<const double> x) { return x[1] + b * std::sin(x[0]); },
                [b](std::span<const double> x, std::span<double> g) {
                    g[0] = b * std::cos(x[0]);
                    g[1] = 1.0;
                })};
        const Layout chart = doublet_layout(1);
        for (const auto& qp : testsup::random_points(37, 40, 2, -1.5, 1.5)) {
            const auto g = metric_pullback(base, change, qp);
            const double direct = 0.5 * poisson_bracket(change[0], change[1], qp, chart);
            CHECK(std::abs(g[1] - direct) <= 1e-8);
            CHECK(std::abs(g[2] + direct) <= 1e-8);
            CHECK(std::abs(g[0]) <= 1e-12);
            CHECK(std::abs(g[3]) <= 1e-12);
        }
    }

    SUBCASE("singular change map is rejected") {
        const ScalarField change[] = {coordinate_field(d, 0), coordinate_field(d, 0)};
        CHECK_THROWS_WITH_AS(metric_pullback(base, change, std::vector<double>{1.0, 2.0}),
                             "non-invertible change of variables", std::runtime_error);
    }
}

TEST_CASE("antisymmetry of builtin metrics at sampled states") {
    for (const char* name : {"relativistic-a", "relativistic-c"}) {
        const auto bundle = make_builtin(name);
        for (const auto& u : relativistic_points(38, 20)) {
            const auto w = bundle.map.apply(u);
            const auto g = block_metric(bundle.generalized->blocks[0], w);
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b)
                    CHECK(std::abs(g[a * 6 + b] + g[b * 6 + a]) < 1e-12);
        }
    }
}

// =============================================================================
// Conjugate coordinates
// =============================================================================

TEST_CASE("conjugate coordinate with unit integrand is the identity") {
    QuadraturePath path;
    path.coordinate = 0;
    path.origin = 0.0;
    path.lo = -5.0;
    path.hi = 5.0;
    path.cells = 64;
    const auto X = conjugate_coordinate(constant_field(1, 1.0), path);
    for (double u = -4.5; u <= 4.5; u += 0.75)
        CHECK(std::abs(X.eval(std::vector<double>{u}) - u) <= 1e-12);
}

TEST_CASE("conjugate coordinate integrates 3Q^2 to Q^3") {
    QuadraturePath path;
    path.coordinate = 0;
    path.origin = 0.0;
    path.lo = -3.0;
    path.hi = 3.0;
    path.cells = 96;
    const auto f =
        make_field(1, [](std::span<const double> u) { return 3.0 * u[0] * u[0]; });
    const auto X = conjugate_coordinate(f, path);
    for (double u = -2.9; u <= 2.9; u += 0.37)
        CHECK(std::abs(X.eval(std::vector<double>{u}) - u * u * u) <= 1e-9);
}

TEST_CASE("conjugate coordinates recover X_i = 2 P_0 Q^i for construction (c)") {
    const auto bundle = make_builtin("relativistic-c");
    const auto& gsys = *bundle.generalized;
    QuadraturePath path;
    path.origin = 0.0;
    path.lo = -3.0;
    path.hi = 3.0;
    path.cells = 64;
    const int z_idx[] = {6};
    const int alphas[] = {0, 2, 4}; // chart slots of Q^1, Q^2, Q^3
    const auto X = construct_conjugate_coordinates(
        gsys.blocks[0].constraints, bundle.map, z_idx, alphas, nullptr, {}, path);

    for (const auto& u : relativistic_points(39, 25)) {
        std::vector<double> clipped = u;
        for (const int a : alphas) clipped[a] = std::clamp(clipped[a], -2.8, 2.8);
        const double p0 = -std::sqrt(clipped[1] * clipped[1] + clipped[3] * clipped[3] +
                                     clipped[5] * clipped[5] + 1.0);
        for (int i = 0; i < 3; ++i) {
            const double expected = 2.0 * p0 * clipped[alphas[i]];
            CHECK(std::abs(X[i].eval(clipped) - expected) <= 1e-10);
        }
    }
}

TEST_CASE("singular integrand on the path is reported") {
    QuadraturePath path;
    path.coordinate = 0;
    path.lo = -1.0;
    path.hi = 1.0;
    path.cells = 8;
    const auto f = make_field(1, [](std::span<const double> u) { return 1.0 / u[0]; });
    const auto X = conjugate_coordinate(f, path);
    CHECK_THROWS_WITH_AS((void)X.eval(std::vector<double>{0.5}),
                         "singular integrand on path", std::runtime_error);
}

// =============================================================================
// Relativistic reduction
// =============================================================================

TEST_CASE("gauge reduction produces the free-particle energy") {
    const auto red = gauge_reduce_relativistic({});
    const std::vector<double> rest{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(red.reduced.hamiltonian.eval(rest) == doctest::Approx(1.0)); // K = m c^2

    const std::vector<double> moving{0.0, 3.0, 0.0, 0.0, 0.0, 0.0};
    const auto v = hamiltonian_rhs(red.reduced, moving);
    CHECK(v[0] == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) CHECK(std::abs(v[2 * k + 1]) < 1e-14);
}

TEST_CASE("the other energy branch is exposed") {
    const auto red = gauge_reduce_relativistic({}, EnergyBranch::positive_p0);
    const std::vector<double> rest{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(red.reduced.hamiltonian.eval(rest) == doctest::Approx(-1.0));
    std::vector<double> t{0.0, std::sqrt(1.0 + 9.0), 0.0, 3.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(std::abs(red.Psi.eval(t)) < 1e-12);
}

TEST_CASE("gauge pair bracket is -2 p_0") {
    const auto red = gauge_reduce_relativistic({});
    for (const auto& u : testsup::random_points(40, 30, 8, 0.3, 1.5)) {
        const double det = constraint_gauge_determinant(red.spec, u);
        CHECK(det == doctest::Approx(-2.0 * u[1]).epsilon(1e-12));
        CHECK(std::abs(det) > 1e-10);
    }
}
