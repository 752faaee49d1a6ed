#include "cyclores/csv.hpp"

#include <fmt/core.h>
#include <fmt/ostream.h>

namespace cyclores::csv {

std::string number(double value) { return fmt::format("{:.17g}", value); }

void write_snapshot(std::ostream& out, const StateVector& state) {
    out << "n,probability\n";
    const auto probs = state.probabilities();
    for (std::size_t n = 0; n < probs.size(); ++n) fmt::print(out, "{},{:.17g}\n", n, probs[n]);
}

void write_series(std::ostream& out, std::span<const double> times,
                  const std::vector<std::vector<double>>& rows) {
    out << "t";
    const std::size_t cells = rows.empty() ? 0 : rows.front().size();
    for (std::size_t i = 0; i < cells; ++i) out << ",P" << i + 1;
    out << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << number(times[r]);
        for (double p : rows[r]) out << ',' << number(p);
        out << '\n';
    }
}

void write_profile(std::ostream& out, std::span<const double> averages) {
    out << "cell,mean_probability\n";
    for (std::size_t i = 0; i < averages.size(); ++i) fmt::print(out, "{},{:.17g}\n", i + 1, averages[i]);
}

void write_scan(std::ostream& out, std::span<const ScanPoint> points) {
    out << "inv_h,h,penetration,barrier_level,start_level\n";
    for (const auto& pt : points) {
        fmt::print(out, "{:.17g},{:.17g},{:.17g},{},{}\n", pt.inv_h, pt.h, pt.penetration, pt.barrier,
                   pt.start_level);
    }
}

void write_spectrum(std::ostream& out, const QeSpectrum& spectrum) {
    out << "q,energy\n";
    for (std::size_t q = 0; q < spectrum.size(); ++q) fmt::print(out, "{},{:.17g}\n", q, spectrum.energy(q));
}

void write_eigenvectors(std::ostream& out, const QeSpectrum& spectrum) {
    const auto& a = spectrum.eigenvectors();
    out << "n";
    for (std::size_t q = 0; q < a.cols(); ++q) out << ",A" << q;
    out << '\n';
    for (std::size_t n = 0; n < a.rows(); ++n) {
        out << n;
        for (std::size_t q = 0; q < a.cols(); ++q) out << ',' << number(a(n, q));
        out << '\n';
    }
}

void write_husimi(std::ostream& out, const HusimiGrid& grid, const Metadata& metadata) {
    for (const auto& [key, value] : metadata) out << "# " << key << " = " << value << '\n';
    out << "x,p,Q\n";
    for (std::size_t i = 0; i < grid.grid.nx; ++i) {
        for (std::size_t j = 0; j < grid.grid.np; ++j) {
            fmt::print(out, "{:.17g},{:.17g},{:.17g}\n", grid.grid.x(i), grid.grid.p(j), grid.at(i, j));
        }
    }
}

void write_contour_levels(std::ostream& out, std::span<const double> levels) {
    out << "index,level\n";
    for (std::size_t i = 0; i < levels.size(); ++i) fmt::print(out, "{},{:.17g}\n", i, levels[i]);
}

}  // namespace cyclores::csv
