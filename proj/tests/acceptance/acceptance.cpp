// Acceptance criteria 1-11: one [PASS]/[FAIL] line each, with [INFO] detail lines.
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include <fmt/core.h>

#include "../support/oracles.hpp"
#include "cyclores/evolution.hpp"
#include "cyclores/phase_space.hpp"
#include "cyclores/special_functions.hpp"

using namespace cyclores;

namespace {

int failures = 0;

ModelParams params(double h, double v0, double delta, std::size_t levels) {
    ModelParams p;
    p.h = h;
    p.v0 = v0;
    p.delta = delta;
    p.levels = levels;
    return p;
}

void verdict(int id, const std::string& title, bool ok, const std::string& detail, double seconds) {
    if (!ok) ++failures;
    fmt::print("[{}] {:>2}. {}: {} ({:.1f} s)\n", ok ? "PASS" : "FAIL", id, title, detail, seconds);
}

template <class... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
    fmt::print("       [INFO] {}\n", fmt::format(f, std::forward<Args>(args)...));
}

class Timer {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double max_diff(const Matrix<complex>& a, const Matrix<complex>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

Matrix<complex> product(const Matrix<complex>& a, const Matrix<complex>& b) {
    Matrix<complex> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const complex x = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += x * b(k, j);
        }
    return c;
}

void cell_structure() {
    Timer t;
    const auto a = cell_partition(build_chain(params(0.6, 0.1, 0.0, 432)));
    const auto b = cell_partition(build_chain(params(0.52, 0.1, 0.0, 100)));
    std::string bounds;
    for (auto x : a.boundaries) bounds += fmt::format(" {}", x);
    info("h = 0.6 boundaries:{}", bounds);
    verdict(1, "cell structure", a.count() == 7 && b.count() == 3,
            fmt::format("h=0.6,N=432 -> {} cells (want 7); h=0.52,N=100 -> {} cells (want 3)", a.count(), b.count()),
            t.seconds());
}

void spectral_oracle() {
    Timer t;
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> h_dist(0.2, 1.5), v_dist(0.01, 0.5), d_dist(-0.01, 0.01);
    std::uniform_int_distribution<std::size_t> n_dist(2, 64);
    double worst_value = 0.0, worst_vector = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        const auto chain = build_chain(params(h_dist(rng), v_dist(rng), d_dist(rng), n_dist(rng)));
        const std::size_t n = chain.size();
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) a[i][i] = chain.diagonal[i];
        for (std::size_t i = 0; i + 1 < n; ++i) a[i][i + 1] = a[i + 1][i] = chain.off_diagonal[i];
        const auto ref = oracle::jacobi_eigen(a);
        const auto sp = solve(chain);
        for (std::size_t q = 0; q < n; ++q) {
            worst_value = std::max(worst_value, std::abs(sp.energy(q) - ref.values[q]));
            // compare vectors up to the overall sign
            double plus = 0.0, minus = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                plus = std::max(plus, std::abs(sp.eigenvectors()(k, q) - ref.vectors[q][k]));
                minus = std::max(minus, std::abs(sp.eigenvectors()(k, q) + ref.vectors[q][k]));
            }
            worst_vector = std::max(worst_vector, std::min(plus, minus));
        }
    }
    verdict(2, "spectral correctness vs dense Jacobi oracle", worst_value < 1e-9 && worst_vector < 1e-9,
            fmt::format("20 draws, N<=64: max |dE| = {:.2e}, max |dA| = {:.2e} (limit 1e-9)", worst_value, worst_vector),
            t.seconds());
}

void parity() {
    Timer t;
    const auto report = check_parity_symmetry(solve(build_chain(params(0.6, 0.1, 0.0, 432))), 1e-8);
    verdict(3, "parity symmetry", report.eigenvalue_defect < 1e-8 && report.vector_defect < 1e-8,
            fmt::format("N=432: eigenvalue defect {:.2e}, vector defect {:.2e} (limit 1e-8)", report.eigenvalue_defect,
                        report.vector_defect),
            t.seconds());
}

void unitarity() {
    Timer t;
    const auto sp = solve(build_chain(params(0.6, 0.1, 0.0, 432)));
    double unitary = 0.0, stationary = 0.0;
    for (double time : {1.0, 1e3, 1e6}) {
        unitary = std::max(unitary, propagator(sp, time).unitarity_defect());
        for (std::size_t q : {std::size_t{0}, std::size_t{100}, std::size_t{431}}) {
            const auto s = StateVector::eigenstate(sp, q);
            const auto p0 = s.probabilities();
            const auto p1 = evolve(s, sp, time).probabilities();
            for (std::size_t n = 0; n < p0.size(); ++n) stationary = std::max(stationary, std::abs(p1[n] - p0[n]));
        }
    }
    const double group = max_diff(product(propagator(sp, 137.5).matrix, propagator(sp, 4096.0).matrix),
                                  propagator(sp, 4233.5).matrix);
    verdict(4, "unitarity and stationarity", unitary < 1e-10 && stationary < 1e-10 && group < 1e-9,
            fmt::format("unitarity {:.2e} (<1e-10), stationarity {:.2e} (<1e-10), group {:.2e} (<1e-9)", unitary,
                        stationary, group),
            t.seconds());
}

void localization() {
    Timer t;
    const auto chain = build_chain(params(0.6, 0.1, 0.0, 432));
    const auto cells = cell_partition(chain);
    const auto sp = solve(chain);
    const auto s0 = StateVector::basis(432, cells.cells[0].center());
    double min_p1 = 1.0;
    for (const auto& row : cell_probability_series(s0, sp, cells, log_spaced_times(1e2, 1e6, 200)))
        min_p1 = std::min(min_p1, row[0]);
    const auto avg = time_averaged_cells(s0, sp, cells, 1e3, 1e6, 200);
    const double ratio = avg[1] / avg[0];
    double gap = 1.0;
    for (std::size_t q = 1; q < sp.size(); ++q) gap = std::min(gap, sp.energy(q) - sp.energy(q - 1));
    info("start level {}; min QE gap {:.3e}, 1/gap = {:.3e} periods", cells.cells[0].center(), gap, 1.0 / gap);
    verdict(5, "localization", min_p1 >= 0.5 && ratio >= 1e-3 && ratio <= 1e-1,
            fmt::format("min P1(t<=1e6) = {:.4f} (>=0.5); P2/P1 = {:.3e} (in [1e-3, 1e-1])", min_p1, ratio),
            t.seconds());
}

void cell_profile() {
    Timer t;
    bool ok = true;
    std::string detail;
    for (double h : {0.52, 0.6}) {
        const auto chain = build_chain(params(h, 0.1, 0.0, 432));
        const auto cells = cell_partition(chain);
        const auto sp = solve(chain);
        const auto avg = time_averaged_cells(StateVector::basis(432, cells.cells[0].center()), sp, cells, 1e3, 1e6, 200);
        bool decreasing = avg.size() >= 5;
        std::string slopes;
        for (std::size_t i = 0; i + 1 < avg.size(); ++i) {
            if (i < 4) decreasing &= avg[i + 1] < avg[i];
            slopes += fmt::format(" {:.2f}", std::log(avg[i + 1] / avg[i]));
        }
        info("h = {}: P = {:.2e} {:.2e} {:.2e} {:.2e} {:.2e}; log-ratios per boundary:{}", h, avg[0], avg[1], avg[2],
             avg[3], avg[4], slopes);
        ok &= decreasing;
        detail += fmt::format("h={}: {} ", h, decreasing ? "decreasing" : "NOT decreasing");
    }
    verdict(6, "exponential cell profile", ok, detail + "for i = 1..5", t.seconds());
}

void blocking() {
    Timer t;
    const auto base = params(0.52, 0.1, 0.0, 100);
    std::vector<double> grid;
    for (double x = 1.60; x <= 1.73 + 1e-12; x += 2e-5) grid.push_back(x);
    const auto scan = scan_penetration(base, grid);
    const auto dips = locate_dips(scan.points, 0.1, 0.01);
    const double b2 = bessel_j1_zero(2);
    const double expected = 2.0 / (b2 * b2);
    std::string where;
    for (double x : dips.positions) where += fmt::format(" {:.5f}", x);
    info("{} grid points, dips at 1/h ={}", scan.points.size(), where);

    const double h_blocked = blocking_parameter(47, 2, base);
    const auto blocked = scan_penetration(base, std::vector<double>{1.0 / h_blocked});
    const double p_blocked = blocked.points.at(0).penetration;
    info("exactly blocked point: 1/h = {:.6f} (f(47) = 0), barrier level {}, P = {:.2e}", 1.0 / h_blocked,
         blocked.points[0].barrier, p_blocked);
    const bool spacing_ok = dips.spacings.size() >= 1 && std::abs(dips.mean_spacing() - expected) <= 0.1 * expected;
    verdict(7, "blocking periodicity", spacing_ok && p_blocked < 1e-6,
            fmt::format("dip spacing {:.5f} vs 2/b2^2 = {:.5f} ({:+.2f}%); blocked P = {:.2e} (<1e-6)",
                        dips.mean_spacing(), expected, 100.0 * (dips.mean_spacing() / expected - 1.0), p_blocked),
            t.seconds());
}

void confinement() {
    Timer t;
    // delta is the coefficient of n on the diagonal; detuning 0.003 enters as -0.003 (see README)
    const auto p = params(0.52, 0.1, -0.003, 100);
    const auto s = evolve(StateVector::basis(100, 6), solve(build_chain(p)), 4e6);
    const std::size_t boundary = spread_boundary(s);
    const double beyond = penetration_coefficient(s, 66);
    const auto resonant = cell_partition(build_chain(params(0.52, 0.1, 0.0, 100)));
    const std::size_t edge = resonant.boundaries.at(1);

    const auto mirrored = evolve(StateVector::basis(100, 6), solve(build_chain(params(0.52, 0.1, 0.003, 100))), 4e6);
    double diff = 0.0;
    for (std::size_t n = 0; n < 100; ++n) diff = std::max(diff, std::abs(mirrored.probabilities()[n] - s.probabilities()[n]));
    info("delta = +0.003 gives spread boundary {}; max | |C_n|^2(+) - |C_n|^2(-) | = {:.1e}", spread_boundary(mirrored), diff);
    verdict(8, "near-resonance confinement", boundary >= 20 && boundary <= 60 && beyond < 1e-6 && boundary < edge,
            fmt::format("spread boundary {} (in [20, 60], v0/delta = 33.3); P(n>66) = {:.1e} (<1e-6); delta=0 cell-2 edge {}",
                        boundary, beyond, edge),
            t.seconds());
}

void harmonic_reduction() {
    Timer t;
    auto ratio_for = [](const ModelParams& p, std::size_t cell, double& omega, double& gap, double& n0) {
        const auto chain = build_chain(p);
        const auto range = cell_partition(chain).cells.at(cell);
        const auto sp = solve(sub_chain(chain, range.first, range.last));
        for (double x : resonance_centers(p))
            if (x >= range.first - 0.5 && x <= range.last + 0.5 && is_stable_center(x, p)) n0 = x;
        omega = small_oscillation_frequency(n0, p);
        const auto e = edge_spacings(sp, 1);
        gap = e.upper[0];
        return gap / omega;
    };
    double omega = 0.0, gap = 0.0, n0 = 0.0;
    const double first = ratio_for(params(0.6, 0.1, 0.0, 12), 0, omega, gap, n0);
    const bool spacing_ok = std::abs(first - 1.0) <= 0.05;
    info("N = 12 cell at h = 0.6: center n0 = {:.3f}, omega~ = {:.6f}, edge gap = {:.6f}, ratio {:.4f}", n0, omega, gap, first);
    for (auto [h, levels, cell] : {std::tuple{0.6, 432, 1}, std::tuple{0.6, 432, 2}, std::tuple{0.2, 432, 2},
                                   std::tuple{0.05, 1100, 2}}) {
        double o = 0.0, g = 0.0, c = 0.0;
        const double r = ratio_for(params(h, 0.1, 0.0, levels), cell, o, g, c);
        info("convergence: h = {}, cell {}: gap/omega~ = {:.4f}", h, cell + 1, r);
    }
    const auto minus = resonance_centers(params(0.52, 0.1, -0.003, 100));
    const auto plus = resonance_centers(params(0.52, 0.1, 0.003, 100));
    info("resonance centers: delta = -0.003 -> {}, delta = +0.003 -> {}", minus.size(), plus.size());
    verdict(9, "harmonic reduction", spacing_ok && minus.size() == 1,
            fmt::format("edge gap / omega~ = {:.4f} (want within 5%); centers for the fig6 parameters = {} (want 1)", first,
                        minus.size()),
            t.seconds());
}

void husimi_suite() {
    Timer t;
    const auto sp = solve(build_chain(params(0.52, 0.1, 0.0, 100)));
    const auto grid = GridSpec::covering(100);
    const auto top = husimi(StateVector::eigenstate(sp, 99), grid);
    const auto bottom = husimi(StateVector::eigenstate(sp, 0), grid);
    double partner = 0.0;
    for (std::size_t i = 0; i < grid.nx; ++i)
        for (std::size_t j = 0; j < grid.np; ++j)
            partner = std::max(partner, std::abs(top.at(i, j) - bottom.at(grid.nx - 1 - i, grid.np - 1 - j)));
    const auto big = solve(build_chain(params(0.6, 0.1, 0.0, 432)));
    const auto wide = husimi(StateVector::eigenstate(big, 431), GridSpec::covering(432));
    const double norm = std::max({std::abs(top.mass - 1.0), std::abs(bottom.mass - 1.0), std::abs(wide.mass - 1.0)});

    double ring = 0.0;
    for (int n : {1, 10, 40}) {
        const auto g = husimi(StateVector::basis(100, n), grid);
        const std::size_t mid = grid.nx / 2;
        std::size_t best = mid;
        for (std::size_t i = mid; i < grid.nx; ++i)
            if (g.at(i, mid) > g.at(best, mid)) best = i;
        // grid.x(mid) is half a cell off zero for even sizes; measure radius directly
        const double r = std::hypot(grid.x(best), grid.p(mid));
        ring = std::max(ring, std::abs(r - std::sqrt(2.0 * n)) / grid.dx());
    }
    verdict(10, "Husimi suite", norm <= 0.02 && ring <= 1.0 && partner < 1e-8,
            fmt::format("normalization defect {:.1e} (<=2%); ring offset {:.2f} grid cells (<=1); partner defect {:.1e} (<1e-8)",
                        norm, ring, partner),
            t.seconds());
}

void coupling_asymptotics() {
    Timer t;
    double worst = 0.0, leading = 0.0, pointwise = 0.0;
    for (double h : {0.52, 0.6})
        for (std::size_t n = 50; n <= 400; ++n) {
            worst = std::max(worst, branch_mismatch(n, h, 0.1));
            const double exact = coupling_laguerre(n, h, 0.1);
            leading = std::max(leading, std::abs(exact - coupling_bessel_leading(n, h, 0.1)) / bessel_envelope(n, h, 0.1));
            pointwise = std::max(pointwise, std::abs(exact - coupling_bessel(n, h, 0.1)) / std::abs(exact));
        }
    info("leading-order form (V0/2) sqrt(n/(n+1)) e^(-h/4) J1(sqrt(2nh)) deviates by up to {:.1f}% of the envelope", 100 * leading);
    info("pointwise relative error of the Bessel limit peaks at {:.2f} next to zeros of f", pointwise);
    verdict(11, "coupling asymptotics", worst < 1e-2,
            fmt::format("n in [50, 400], h in {{0.52, 0.6}}: max |exact - J1 limit| / envelope = {:.2e} (<1e-2)", worst),
            t.seconds());
}

}  // namespace

int main() {
    cell_structure();
    spectral_oracle();
    parity();
    unitarity();
    localization();
    cell_profile();
    blocking();
    confinement();
    harmonic_reduction();
    husimi_suite();
    coupling_asymptotics();
    fmt::print("{} of 11 criteria passed\n", 11 - failures);
    return failures == 0 ? 0 : 1;
}
