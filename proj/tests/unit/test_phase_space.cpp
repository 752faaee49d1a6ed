#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cyclores/errors.hpp"
#include "cyclores/phase_space.hpp"

using namespace cyclores;

namespace {

ModelParams params(double h, double v0, double delta, std::size_t levels) {
    ModelParams p;
    p.h = h;
    p.v0 = v0;
    p.delta = delta;
    p.levels = levels;
    return p;
}

// |<alpha|n>|^2 = e^{-|alpha|^2} |alpha|^{2n} / n!
double landau_q(int n, double x, double p) {
    const double a2 = 0.5 * (x * x + p * p);
    return std::exp(-a2 + n * std::log(a2) - std::lgamma(n + 1.0));
}

}  // namespace

TEST_CASE("ground Landau level is a Gaussian centred at the origin") {
    const auto s = StateVector::basis(20, 0);
    for (double x : {-2.0, 0.0, 0.7, 3.1})
        for (double p : {-1.0, 0.0, 2.2}) CHECK(husimi_value(s, x, p) == doctest::Approx(std::exp(-0.5 * (x * x + p * p))).epsilon(1e-13));
    const auto g = husimi(s, GridSpec::covering(20, 65));
    std::size_t best = 0;
    for (std::size_t i = 0; i < g.values.size(); ++i)
        if (g.values[i] > g.values[best]) best = i;
    CHECK(best == 32 * 65 + 32);
    CHECK(g.max() == doctest::Approx(1.0));
}

TEST_CASE("Landau level 10 is a ring at |alpha|^2 = 10") {
    const auto s = StateVector::basis(40, 10);
    for (double x : {1.0, 4.47, 6.0}) CHECK(husimi_value(s, x, 0.3) == doctest::Approx(landau_q(10, x, 0.3)).epsilon(1e-12));

    double worst = 0.0;
    for (double r : {1.0, 3.0, std::sqrt(20.0), 7.0}) {
        const double q0 = husimi_value(s, r, 0.0);
        for (int k = 1; k < 64; ++k) {
            const double th = 2.0 * std::numbers::pi * k / 64;
            worst = std::max(worst, std::abs(husimi_value(s, r * std::cos(th), r * std::sin(th)) - q0));
        }
    }
    CHECK(worst < 1e-10);

    const auto g = husimi(s, GridSpec::covering(40, 201));
    const std::size_t mid = 100;
    std::size_t best = mid;
    for (std::size_t i = mid; i < 201; ++i)
        if (g.at(i, mid) > g.at(best, mid)) best = i;
    CHECK(std::abs(g.grid.x(best) - std::sqrt(20.0)) <= g.grid.dx());
}

TEST_CASE("large level numbers do not overflow") {
    const auto s = StateVector::basis(500, 450);
    const double r = std::sqrt(900.0);
    const double q = husimi_value(s, r, 0.0);
    CHECK(std::isfinite(q));
    CHECK(q == doctest::Approx(landau_q(450, r, 0.0)).epsilon(1e-10));
}

TEST_CASE("normalization on a covering grid and warning on a small one") {
    const auto sp = solve(build_chain(params(0.6, 0.1, 0.0, 432)));
    const auto g = husimi(StateVector::eigenstate(sp, 431), GridSpec::covering(432));
    CHECK(std::abs(g.mass - 1.0) < 0.02);
    CHECK_FALSE(g.warning.has_value());
    for (double q : g.values) CHECK(q >= 0.0);

    const auto small = husimi(StateVector::basis(40, 10), GridSpec{-2.0, 2.0, -2.0, 2.0, 41, 41});
    CHECK(small.mass < 0.98);
    REQUIRE(small.warning.has_value());
    CHECK(small.warning->find("mass") != std::string::npos);

    CHECK_THROWS_AS(husimi(StateVector::basis(4, 0), GridSpec{-1.0, 1.0, -1.0, 1.0, 1, 10}), PreconditionError);
}

TEST_CASE("parity partners are related by alpha -> -alpha") {
    const auto sp = solve(build_chain(params(0.52, 0.1, 0.0, 100)));
    const auto grid = GridSpec::covering(100, 128);
    const auto top = husimi(StateVector::eigenstate(sp, 99), grid);
    const auto bottom = husimi(StateVector::eigenstate(sp, 0), grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.nx; ++i)
        for (std::size_t j = 0; j < grid.np; ++j)
            worst = std::max(worst, std::abs(top.at(i, j) - bottom.at(grid.nx - 1 - i, grid.np - 1 - j)));
    CHECK(worst < 1e-8);
}

TEST_CASE("localized eigenstates have localized Husimi functions") {
    for (const auto& p : {params(0.52, 0.1, 0.0, 100), params(0.6, 0.1, 0.0, 432)}) {
        const auto chain = build_chain(p);
        const auto cells = cell_partition(chain);
        const auto sp = solve(chain);
        const auto profile = localization_profile(sp, cells);
        for (std::size_t q : {std::size_t{0}, sp.size() - 1}) {
            const auto& w = profile[q].cell_weights;
            const auto k = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
            REQUIRE(w[k] >= 0.9);
            const auto g = husimi(StateVector::eigenstate(sp, q), GridSpec::covering(p.levels, 256));
            const auto c = cells.cells[k];
            CHECK(radial_mass_fraction(g, std::sqrt(2.0 * c.first), std::sqrt(2.0 * (c.last + 1))) >= 0.85);
        }
    }
}

TEST_CASE("contour export") {
    const auto sp = solve(build_chain(params(0.52, 0.1, 0.0, 100)));
    const auto g = husimi(StateVector::eigenstate(sp, 99), GridSpec::covering(100, 128));

    const auto none = husimi_contour_export(g, {});
    CHECK(none.levels.empty());
    CHECK(none.warnings.empty());

    const auto defaults = default_contour_levels(g);
    REQUIRE(defaults.size() == 5);
    CHECK(defaults[0] == doctest::Approx(0.1 * g.max()));
    CHECK(defaults[4] == doctest::Approx(0.9 * g.max()));
    for (double level : defaults) CHECK(contour_closed(g, level));

    const std::vector<double> high = {0.5 * g.max(), 2.0 * g.max(), 3.0 * g.max()};
    const auto clipped = husimi_contour_export(g, high);
    CHECK(clipped.levels.size() == 1);
    CHECK(clipped.warnings.size() == 2);

    const std::vector<double> descending = {0.2, 0.1};
    const std::vector<double> negative = {-0.1, 0.1};
    CHECK_THROWS_AS(husimi_contour_export(g, descending), PreconditionError);
    CHECK_THROWS_AS(husimi_contour_export(g, negative), PreconditionError);

    // a level low enough to reach the border is not closed
    CHECK_FALSE(contour_closed(g, 1e-300));
}

TEST_CASE("parallel grid equals the serial reference") {
    const auto sp = solve(build_chain(params(0.6, 0.1, 0.0, 200)));
    const auto s = StateVector::eigenstate(sp, 150);
    const auto grid = GridSpec::covering(200, 64);
    const auto a = husimi(s, grid, Execution::serial);
    const auto b = husimi(s, grid, Execution::parallel);
    const auto ref = kernels::serial::husimi_values(s, grid);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(a.values[i] == ref[i]);
        CHECK(b.values[i] == ref[i]);
    }
}
