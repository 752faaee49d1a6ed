// Serial reference vs OpenMP kernels: wall time per call and max deviation of the results.
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>

#include <fmt/core.h>

#include "cyclores/evolution.hpp"
#include "cyclores/phase_space.hpp"

using namespace cyclores;

namespace {

double seconds_per_call(int reps, const std::function<void()>& fn) {
    fn();  // warm-up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

void report(const char* name, double serial, double parallel, double deviation) {
    fmt::print("{:<24} {:>12.3e} {:>12.3e} {:>8.2f} {:>12.1e}\n", name, serial, parallel, serial / parallel, deviation);
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    const int reps = quick ? 1 : 20;

    ModelParams p;  // h = 0.6, v0 = 0.1, N = 432
    if (quick) p.levels = 100;
    const auto chain = build_chain(p);
    const auto spectrum = solve(chain);
    const auto cells = cell_partition(chain);
    const auto start = StateVector::basis(p.levels, cells.cells[0].center());

    fmt::print("N = {}, threads = {}\n", p.levels, thread_count());
    fmt::print("{:<24} {:>12} {:>12} {:>8} {:>12}\n", "kernel", "serial [s]", "parallel [s]", "speedup", "max |diff|");

    {
        StateVector a = start, b = start;
        const double ts = seconds_per_call(reps * 10, [&] { a = evolve(start, spectrum, 4e5, Execution::serial); });
        const double tp = seconds_per_call(reps * 10, [&] { b = evolve(start, spectrum, 4e5, Execution::parallel); });
        double dev = 0.0;
        for (std::size_t n = 0; n < a.size(); ++n) dev = std::max(dev, std::abs(a.amplitudes()[n] - b.amplitudes()[n]));
        report("evolve", ts, tp, dev);
    }
    {
        Propagator a, b;
        const double ts = seconds_per_call(reps, [&] { a = propagator(spectrum, 4e5, Execution::serial); });
        const double tp = seconds_per_call(reps, [&] { b = propagator(spectrum, 4e5, Execution::parallel); });
        double dev = 0.0;
        for (std::size_t i = 0; i < a.matrix.rows(); ++i)
            for (std::size_t j = 0; j < a.matrix.cols(); ++j) dev = std::max(dev, std::abs(a.matrix(i, j) - b.matrix(i, j)));
        report("propagator", ts, tp, dev);
    }
    {
        const auto top = StateVector::eigenstate(spectrum, spectrum.size() - 1);
        const auto grid = GridSpec::covering(p.levels, quick ? 64 : 256);
        HusimiGrid a, b;
        const double ts = seconds_per_call(1, [&] { a = husimi(top, grid, Execution::serial); });
        const double tp = seconds_per_call(1, [&] { b = husimi(top, grid, Execution::parallel); });
        double dev = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) dev = std::max(dev, std::abs(a.values[i] - b.values[i]));
        report("husimi", ts, tp, dev);
    }
    {
        ModelParams base;
        base.h = 0.6;
        base.levels = 100;
        std::vector<double> grid(quick ? 8 : 64);
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 1.60 + 0.1 * static_cast<double>(i) / grid.size();
        ScanResult a, b;
        const double ts = seconds_per_call(1, [&] { a = scan_penetration(base, grid, {}, Execution::serial); });
        const double tp = seconds_per_call(1, [&] { b = scan_penetration(base, grid, {}, Execution::parallel); });
        double dev = 0.0;
        for (std::size_t i = 0; i < a.points.size(); ++i)
            dev = std::max(dev, std::abs(a.points[i].penetration - b.points[i].penetration));
        report("scan_penetration", ts, tp, dev);
    }
    return 0;
}
