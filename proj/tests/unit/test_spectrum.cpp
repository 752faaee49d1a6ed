#include <cmath>
#include <random>

#include "doctest.h"
#include "../support/oracles.hpp"

#include "cyclores/errors.hpp"
#include "cyclores/spectrum.hpp"
#include "cyclores/tridiagonal.hpp"

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

std::vector<std::vector<double>> dense(const CouplingChain& chain) {
    const std::size_t n = chain.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) a[i][i] = chain.diagonal[i];
    for (std::size_t i = 0; i + 1 < n; ++i) a[i][i + 1] = a[i + 1][i] = chain.off_diagonal[i];
    return a;
}

// Top gap of the cell's own spectrum over the harmonic spacing at the cell's stable center.
double edge_ratio(const ModelParams& p, std::size_t cell) {
    const auto chain = build_chain(p);
    const auto range = cell_partition(chain).cells.at(cell);
    const auto sp = solve(sub_chain(chain, range.first, range.last));
    double n0 = -1.0;
    for (double x : resonance_centers(p))
        if (x >= range.first - 0.5 && x <= range.last + 0.5 && is_stable_center(x, p)) n0 = x;
    const auto& e = sp.eigenvalues();
    return (e[e.size() - 1] - e[e.size() - 2]) / small_oscillation_frequency(n0, p);
}

}  // namespace

TEST_CASE("decoupled levels give the diagonal and identity vectors") {
    const auto sp = solve(build_chain(params(0.6, 0.0, 0.003, 5)));
    for (std::size_t q = 0; q < 5; ++q) {
        CHECK(sp.energy(q) == doctest::Approx(0.003 * q));
        for (std::size_t n = 0; n < 5; ++n) CHECK(sp.eigenvectors()(n, q) == (n == q ? 1.0 : 0.0));
    }
}

TEST_CASE("two-level closed form") {
    CouplingChain chain;
    chain.params = params(0.6, 0.1, 0.0, 2);
    chain.diagonal = {0.0, 0.0};
    chain.off_diagonal = {0.25};
    const auto sp = solve(chain);
    CHECK(sp.energy(0) == doctest::Approx(-0.25));
    CHECK(sp.energy(1) == doctest::Approx(0.25));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(sp.eigenvectors()(0, 0)) == doctest::Approx(s));
    CHECK(sp.eigenvectors()(0, 0) * sp.eigenvectors()(1, 0) == doctest::Approx(-0.5));
    CHECK(sp.eigenvectors()(0, 1) * sp.eigenvectors()(1, 1) == doctest::Approx(0.5));
    const auto parity = check_parity_symmetry(sp, 1e-12);
    CHECK(parity.max_defect() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(parity.symmetric);
}

TEST_CASE("eigenpairs match a dense Jacobi oracle on 20 random chains") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> h_dist(0.2, 1.5), v_dist(0.01, 0.5), d_dist(-0.01, 0.01);
    std::uniform_int_distribution<std::size_t> n_dist(2, 64);
    for (int draw = 0; draw < 20; ++draw) {
        const auto chain = build_chain(params(h_dist(rng), v_dist(rng), d_dist(rng), n_dist(rng)));
        const auto sp = solve(chain);
        const auto ref = oracle::jacobi_eigen(dense(chain));
        double value_err = 0.0, vector_err = 0.0;
        for (std::size_t q = 0; q < sp.size(); ++q) {
            value_err = std::max(value_err, std::abs(sp.energy(q) - ref.values[q]));
            double overlap = 0.0;
            for (std::size_t n = 0; n < sp.size(); ++n) overlap += sp.eigenvectors()(n, q) * ref.vectors[q][n];
            vector_err = std::max(vector_err, 1.0 - std::abs(overlap));
        }
        CHECK(value_err < 1e-9);
        CHECK(vector_err < 1e-9);
    }
}

TEST_CASE("raw tridiagonal solver on random symmetric input") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (std::size_t n : {1u, 3u, 17u, 64u}) {
        std::vector<double> d(n), e(n ? n - 1 : 0);
        for (auto& x : d) x = g(rng);
        for (auto& x : e) x = g(rng);
        const auto res = symmetric_tridiagonal_eigen(d, e);
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) a[i][i] = d[i];
        for (std::size_t i = 0; i + 1 < n; ++i) a[i][i + 1] = a[i + 1][i] = e[i];
        const auto ref = oracle::jacobi_eigen(a);
        for (std::size_t q = 0; q < n; ++q) CHECK(res.values[q] == doctest::Approx(ref.values[q]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("iteration budget exhaustion is reported") {
    std::vector<double> d = {1.0, 2.0, 3.0, 4.0}, e = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(symmetric_tridiagonal_eigen(d, e, 0), NumericalError);
}

TEST_CASE("solve needs at least two levels") {
    CouplingChain chain;
    chain.diagonal = {0.0};
    CHECK_THROWS_AS(solve(chain), PreconditionError);
}

TEST_CASE("full-size invariants at h = 0.6, N = 432") {
    const auto sp = solve(build_chain(params(0.6, 0.1, 0.0, 432)));
    const auto d = diagnose(sp);
    CHECK(d.orthonormality < 1e-10);
    CHECK(d.completeness < 1e-10);
    CHECK(d.residual < 1e-9 * d.residual_scale);
    CHECK(d.trace < 1e-8);
    for (std::size_t q = 1; q < sp.size(); ++q) CHECK(sp.energy(q) >= sp.energy(q - 1));
    // sign convention: the largest-magnitude component of every eigenvector is positive
    for (std::size_t q = 0; q < sp.size(); ++q) {
        const auto v = sp.eigenvector(q);
        const auto it = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        CHECK(*it > 0.0);
    }
}

TEST_CASE("detuned trace identity") {
    const auto sp = solve(build_chain(params(0.52, 0.1, 0.003, 200)));
    CHECK(diagnose(sp).trace < 1e-8);
}

TEST_CASE("parity symmetry") {
    for (std::size_t n : {2u, 12u, 101u, 432u}) {
        const auto sp = solve(build_chain(params(0.6, 0.1, 0.0, n)));
        const auto report = check_parity_symmetry(sp, 1e-8);
        CHECK(report.max_defect() < 1e-8);
        CHECK(report.symmetric);
        for (std::size_t q = 0; q < n; ++q) CHECK(report.partner[report.partner[q]] == q);
    }
    // odd N: the zero eigenvalue pairs with itself
    const auto odd = check_parity_symmetry(solve(build_chain(params(0.6, 0.1, 0.0, 101))), 1e-8);
    CHECK(odd.partner[50] == 50);
    CHECK_THROWS_AS(check_parity_symmetry(solve(build_chain(params(0.6, 0.1, 0.003, 20))), 1e-8), PreconditionError);
}

TEST_CASE("scaling v0 scales eigenvalues and keeps eigenvectors") {
    const auto a = solve(build_chain(params(0.52, 0.1, 0.0, 150)));
    const auto b = solve(build_chain(params(0.52, 0.3, 0.0, 150)));
    for (std::size_t q = 0; q < a.size(); ++q) {
        CHECK(b.energy(q) == doctest::Approx(3.0 * a.energy(q)).epsilon(1e-12).scale(1e-12));
        for (std::size_t n = 0; n < a.size(); ++n) CHECK(std::abs(b.eigenvectors()(n, q) - a.eigenvectors()(n, q)) < 1e-10);
    }
}

TEST_CASE("localization profile") {
    const auto chain = build_chain(params(0.6, 0.1, 0.0, 432));
    const auto cells = cell_partition(chain);
    const auto sp = solve(chain);
    const auto profile = localization_profile(sp, cells);
    REQUIRE(profile.size() == 432);
    for (const auto& rec : profile) {
        double total = 0.0;
        for (double w : rec.cell_weights) total += w;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (const auto* rec : {&profile.front(), &profile.back()})
        CHECK(*std::max_element(rec->cell_weights.begin(), rec->cell_weights.end()) >= 0.9);

    // central 5% of the spectral range vs the extremal 5%
    const double lo = sp.eigenvalues().front(), hi = sp.eigenvalues().back(), span = hi - lo;
    double central = 0.0, edge = 0.0;
    int nc = 0, ne = 0;
    for (const auto& rec : profile) {
        const double x = (rec.energy - lo) / span;
        if (std::abs(x - 0.5) <= 0.025) central += rec.participation_ratio, ++nc;
        if (x <= 0.025 || x >= 0.975) edge += rec.participation_ratio, ++ne;
    }
    REQUIRE(nc > 0);
    REQUIRE(ne > 0);
    CHECK(central / nc > edge / ne);

    // decoupled levels: each eigenvector is one level
    const auto flat = solve(build_chain(params(0.6, 0.0, 0.003, 432)));
    for (const auto& rec : localization_profile(flat, cells)) {
        CHECK(rec.participation_ratio == doctest::Approx(1.0));
        CHECK(*std::max_element(rec.cell_weights.begin(), rec.cell_weights.end()) == doctest::Approx(1.0));
    }
}

TEST_CASE("edge spacings") {
    const auto flat = edge_spacings(solve(build_chain(params(0.6, 0.0, 0.003, 20))), 5);
    for (double g : flat.lower) CHECK(g == doctest::Approx(0.003));
    for (double g : flat.upper) CHECK(g == doctest::Approx(0.003));

    const auto a = edge_spacings(solve(build_chain(params(0.6, 0.1, 0.0, 100))), 4);
    const auto b = edge_spacings(solve(build_chain(params(0.6, 0.2, 0.0, 100))), 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(b.lower[i] == doctest::Approx(2.0 * a.lower[i]).epsilon(1e-12));
        CHECK(b.upper[i] == doctest::Approx(2.0 * a.upper[i]).epsilon(1e-12));
    }
    const auto sp = solve(build_chain(params(0.6, 0.1, 0.0, 10)));
    CHECK_THROWS_AS(edge_spacings(sp, 0), PreconditionError);
    CHECK_THROWS_AS(edge_spacings(sp, 5), PreconditionError);
}

TEST_CASE("single-cell edge spacing approaches the harmonic value as cells grow") {
    // the lowest cell at h = 0.6 carries a large anharmonic correction
    const double first = edge_ratio(params(0.6, 0.1, 0.0, 432), 0);
    CHECK(first == doctest::Approx(0.8555).epsilon(1e-3));
    CHECK(edge_ratio(params(0.6, 0.1, 0.0, 432), 2) > edge_ratio(params(0.6, 0.1, 0.0, 432), 1));
    CHECK(edge_ratio(params(0.6, 0.1, 0.0, 432), 1) > first);
    CHECK(std::abs(edge_ratio(params(0.05, 0.1, 0.0, 1100), 2) - 1.0) < 0.01);
}

TEST_CASE("detuned eigenvectors are confined to about v0/delta levels") {
    const double v0 = 0.1, delta = 0.003;
    const auto sp = solve(build_chain(params(0.52, v0, delta, 200)));
    const auto width = static_cast<long>(v0 / delta);
    for (std::size_t q = static_cast<std::size_t>(3 * v0 / delta); q < sp.size(); ++q) {
        const auto v = sp.eigenvector(q);
        const auto peak = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) - v.begin();
        double outside = 0.0;
        for (long n = 0; n < static_cast<long>(v.size()); ++n)
            if (std::abs(n - peak) > width) outside += v[n] * v[n];
        CHECK(outside < 1e-6);
    }
}
