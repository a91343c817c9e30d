#include "nambu/builtins.hpp"
#include "nambu/fields.hpp"
#include "nambu/systems.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace nambu;

TEST_CASE("gradient of bilinear product is exact under central differences") {
    const auto f = make_field(2, [](std::span<const double> x) { return x[0] * x[1]; });
    const std::vector<double> at{2.0, 3.0};
    const auto g = gradient(f, at);
    // Exact up to the rounding of the difference quotient itself.
    CHECK(g[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(g[1] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("gradient vanishes at a critical point") {
    const auto f = make_field(
        2, [](std::span<const double> x) { return 0.25 * (x[0] * x[0] + x[1] * x[1]); });
    const auto g = gradient(f, std::vector<double>{0.0, 0.0});
    CHECK(std::abs(g[0]) < 1e-12);
    CHECK(std::abs(g[1]) < 1e-12);
}

TEST_CASE("pullback of the induced constraint has vanishing chart gradient") {
    // The constraint is identically zero along the embedded surface, so its
    // pullback gradient must vanish everywhere, not just at (1,1).
    const auto bundle = make_builtin("quadratic-triplet");
    const auto pulled = pullback_to_chart(bundle.nambu->constraints[0], bundle.map);
    const std::vector<double> at{1.0, 1.0};
    const auto exact = gradient(pulled, at);
    CHECK(std::abs(exact[0]) < 1e-14);
    CHECK(std::abs(exact[1]) < 1e-14);
    const auto fd = fd_gradient(pulled, at);
    CHECK(std::abs(fd[0]) < 1e-10);
    CHECK(std::abs(fd[1]) < 1e-10);
}

TEST_CASE("central differences converge at second order") {
    const auto f = testsup::random_smooth(3, 42);
    const auto pts = testsup::random_points(7, 5, 3, -1.0, 1.0);
    double err_h = 0.0, err_h2 = 0.0;
    const double h = 1e-3;
    for (const auto& p : pts) {
        const auto exact = gradient(f, p);
        const auto g1 = fd_gradient(f, p, h);
        const auto g2 = fd_gradient(f, p, h / 2.0);
        err_h += testsup::sup_diff(exact, g1);
        err_h2 += testsup::sup_diff(exact, g2);
    }
    const double ratio = err_h / err_h2;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("fd gradient reports the offending coordinate on non-finite values") {
    const auto f = make_field(2, [](std::span<const double> x) {
        return std::sqrt(x[1]); // NaN for x[1] < 0
    });
    try {
        fd_gradient(f, std::vector<double>{1.0, 0.0});
        FAIL("expected non-finite evaluation");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find("non-finite evaluation") != std::string::npos);
        CHECK(what.find("1") != std::string::npos);
    }
}

TEST_CASE("jacobian determinant of coordinate projections is one") {
    const int n = 5;
    std::vector<ScalarField> fields;
    std::vector<int> axes;
    for (int i = 0; i < n; ++i) {
        fields.push_back(coordinate_field(n, i));
        axes.push_back(i);
    }
    const auto x = testsup::random_point(CounterRng{3}, 0, n, -2.0, 2.0);
    CHECK(jacobian_determinant(fields, x, axes) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("triplet map (x,y) block has determinant q p / 2") {
    const auto bundle = make_builtin("quadratic-triplet");
    const std::vector<double> qp{1.0, 1.0};
    const ScalarField fields[] = {bundle.map.components[0], bundle.map.components[1]};
    const int axes[] = {0, 1};
    const double det = jacobian_determinant(fields, qp, axes);
    CHECK(det == doctest::Approx(0.5).epsilon(1e-14));
    // Cross-check: this block determinant is {x, y}_PB = z = qp/2.
    CHECK(det == doctest::Approx(bundle.map.components[2].eval(qp)).epsilon(1e-14));
}

TEST_CASE("repeated field rows annihilate the determinant") {
    const auto f = testsup::random_quadratic(3, 11);
    const ScalarField fields[] = {f, testsup::random_quadratic(3, 12), f};
    const int axes[] = {0, 1, 2};
    const auto x = testsup::random_point(CounterRng{4}, 1, 3, -1.0, 1.0);
    CHECK(std::abs(jacobian_determinant(fields, x, axes)) < 1e-13);
}

TEST_CASE("determinant argument checking") {
    CHECK_THROWS_WITH_AS(jacobian_determinant({}, std::vector<double>{1.0}, {}),
                         "empty Jacobian", std::invalid_argument);
    const ScalarField fields[] = {coordinate_field(2, 0), coordinate_field(2, 1)};
    const int dup[] = {0, 0};
    CHECK_THROWS_AS(jacobian_determinant(fields, std::vector<double>{1.0, 2.0}, dup),
                    std::invalid_argument);
}

TEST_CASE("determinant antisymmetry and multilinearity") {
    const int n = 4;
    std::vector<ScalarField> fields;
    for (int i = 0; i < n; ++i) fields.push_back(testsup::random_quadratic(n, 20 + i));
    std::vector<int> axes{0, 1, 2, 3};
    const auto pts = testsup::random_points(9, 20, n, -1.5, 1.5);

    for (const auto& x : pts) {
        const double base = jacobian_determinant(fields, x, axes);

        auto swapped = fields;
        std::swap(swapped[1], swapped[3]);
        const double field_swap = jacobian_determinant(swapped, x, axes);
        CHECK(std::abs(field_swap + base) <= 1e-12 * std::max(1.0, std::abs(base)));

        std::vector<int> axes_swapped{2, 1, 0, 3};
        const double axis_swap = jacobian_determinant(fields, x, axes_swapped);
        CHECK(std::abs(axis_swap + base) <= 1e-12 * std::max(1.0, std::abs(base)));

        auto scaled = fields;
        scaled[2] = field_scaled(fields[2], -2.5);
        const double scaled_det = jacobian_determinant(scaled, x, axes);
        CHECK(std::abs(scaled_det + 2.5 * base) <= 1e-10 * std::max(1.0, std::abs(base)));
    }
}
