#include "cyclores/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/core.h>

#include "cyclores/errors.hpp"
#include "cyclores/special_functions.hpp"

namespace cyclores {
namespace {

constexpr double kJ1Max = 0.5818652242815963;  // max of J1, at x = 1.8411837813

double laguerre_branch(double n, double h, double v0) {
    return 0.5 * v0 * std::exp(-0.25 * h) * std::sqrt(h / (2.0 * (n + 1.0))) *
           laguerre_l1(n, 0.5 * h);
}

double bessel_branch(double n, double h, double v0) {
    return 0.5 * v0 * bessel_j1(std::sqrt(2.0 * (n + 1.0) * h));
}

}  // namespace

void ModelParams::validate() const {
    if (!(std::isfinite(h) && h > 0.0)) throw DomainError("params.h must be finite and > 0");
    if (!(std::isfinite(v0) && v0 >= 0.0)) throw DomainError("params.v0 must be finite and >= 0");
    if (!std::isfinite(delta)) throw DomainError("params.delta must be finite");
    if (levels < 2) throw DomainError("params.levels must be >= 2");
}

double coupling_laguerre(std::size_t n, double h, double v0) {
    return 0.5 * v0 * std::exp(-0.25 * h) * std::sqrt(h / (2.0 * (n + 1.0))) *
           laguerre_l1(static_cast<long>(n), 0.5 * h);
}

double coupling_bessel(std::size_t n, double h, double v0) {
    return bessel_branch(static_cast<double>(n), h, v0);
}

double coupling_bessel_leading(double n, double h, double v0) {
    return 0.5 * v0 * std::sqrt(n / (n + 1.0)) * std::exp(-0.25 * h) *
           bessel_j1(std::sqrt(2.0 * n * h));
}

double bessel_envelope(double n, double h, double v0) {
    const double x = std::sqrt(2.0 * (n + 1.0) * h);
    return 0.5 * v0 * std::min(kJ1Max, std::sqrt(2.0 / (std::numbers::pi * x)));
}

double branch_mismatch(std::size_t n, double h, double v0) {
    const double scale = bessel_envelope(static_cast<double>(n), h, v0);
    if (scale == 0.0) return 0.0;
    return std::abs(coupling_laguerre(n, h, v0) - coupling_bessel(n, h, v0)) / scale;
}

double coupling(std::size_t n, const ModelParams& params) {
    if (n + 2 > params.levels) {
        throw IndexError(fmt::format("coupling: link {} outside [0, {}]", n, params.levels - 2));
    }
    return n < params.n_switch ? coupling_laguerre(n, params.h, params.v0)
                               : coupling_bessel(n, params.h, params.v0);
}

double coupling_continuous(double n, const ModelParams& params, double branch_at) {
    if (!(n > -1.0)) throw DomainError("coupling_continuous: n must exceed -1");
    return branch_at < static_cast<double>(params.n_switch)
               ? laguerre_branch(n, params.h, params.v0)
               : bessel_branch(n, params.h, params.v0);
}

double coupling_first_derivative(double n, const ModelParams& params) {
    const double s = kDerivativeStep;
    return (coupling_continuous(n + s, params, n) - coupling_continuous(n - s, params, n)) /
           (2.0 * s);
}

double coupling_second_derivative(double n, const ModelParams& params) {
    const double s = kDerivativeStep;
    return (coupling_continuous(n + s, params, n) - 2.0 * coupling_continuous(n, params, n) +
            coupling_continuous(n - s, params, n)) /
           (s * s);
}

double CouplingChain::max_coupling() const {
    double m = 0.0;
    for (double f : off_diagonal) m = std::max(m, std::abs(f));
    return m;
}

double CouplingChain::max_diagonal() const {
    double m = 0.0;
    for (double d : diagonal) m = std::max(m, std::abs(d));
    return m;
}

CouplingChain build_chain(const ModelParams& params) {
    params.validate();
    const std::size_t n_links = params.levels - 1;
    CouplingChain chain;
    chain.params = params;
    chain.diagonal.resize(params.levels);
    for (std::size_t n = 0; n < params.levels; ++n) {
        chain.diagonal[n] = static_cast<double>(n) * params.delta;
    }

    chain.off_diagonal.resize(n_links);
    const double x = 0.5 * params.h;
    const double prefactor = 0.5 * params.v0 * std::exp(-0.25 * params.h);
    // one recurrence pass for the exact branch
    double previous = 1.0;
    double current = 2.0 - x;
    const std::size_t exact_end = std::min(params.n_switch, n_links);
    for (std::size_t n = 0; n < exact_end; ++n) {
        const double laguerre = n == 0 ? previous : current;
        chain.off_diagonal[n] = prefactor * std::sqrt(params.h / (2.0 * (n + 1.0))) * laguerre;
        if (n >= 1) {
            const double k = static_cast<double>(n);
            const double next = ((2.0 * k + 2.0 - x) * current - (k + 1.0) * previous) / (k + 1.0);
            previous = current;
            current = next;
        }
    }
    for (std::size_t n = exact_end; n < n_links; ++n) {
        chain.off_diagonal[n] = coupling_bessel(n, params.h, params.v0);
    }

    if (params.n_switch < n_links) {
        const double jump = branch_mismatch(params.n_switch, params.h, params.v0);
        if (jump > kBranchTolerance) {
            throw NumericalError(fmt::format(
                "coupling branches disagree at n_switch = {}: jump = {:.3e} envelopes (h = {})",
                params.n_switch, jump, params.h));
        }
    }
    return chain;
}

CouplingChain sub_chain(const CouplingChain& chain, std::size_t first, std::size_t last) {
    if (first >= last || last >= chain.size()) {
        throw IndexError(fmt::format("sub_chain: bad range [{}, {}]", first, last));
    }
    CouplingChain out;
    out.params = chain.params;
    out.params.levels = last - first + 1;
    out.diagonal.assign(chain.diagonal.begin() + first, chain.diagonal.begin() + last + 1);
    out.off_diagonal.assign(chain.off_diagonal.begin() + first, chain.off_diagonal.begin() + last);
    return out;
}

std::size_t CellPartition::cell_of(std::size_t n) const {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].contains(n)) return i;
    }
    throw IndexError(fmt::format("cell_of: level {} not covered", n));
}

CellPartition cell_partition(const CouplingChain& chain) {
    const auto& f = chain.off_diagonal;
    if (std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; })) {
        throw DomainError("cell_partition: all couplings vanish, no usable partition");
    }
    CellPartition partition;
    const std::size_t n_levels = chain.size();
    for (std::size_t n = 0; n < f.size(); ++n) {
        std::size_t boundary = 0;
        if (f[n] == 0.0) {
            boundary = n + 1;
        } else if (n > 0 && f[n - 1] != 0.0 && f[n - 1] * f[n] < 0.0) {
            boundary = n;
        }
        if (boundary > 0 && boundary < n_levels &&
            (partition.boundaries.empty() || partition.boundaries.back() < boundary)) {
            partition.boundaries.push_back(boundary);
        }
    }
    std::size_t first = 0;
    for (std::size_t b : partition.boundaries) {
        partition.cells.push_back({first, b - 1});
        first = b;
    }
    partition.cells.push_back({first, n_levels - 1});
    return partition;
}

std::vector<double> resonance_centers(const ModelParams& params) {
    params.validate();
    std::vector<double> centers;
    if (params.v0 == 0.0) return centers;

    const auto g = [&](double n) {
        return params.delta + 2.0 * coupling_first_derivative(n, params);
    };
    const auto bisect = [&](double lo, double hi, double glo) {
        for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = g(mid);
            if ((gm < 0.0) == (glo < 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    // sample each coupling branch separately so no bracket straddles the switch
    const auto scan = [&](double from, double to) {
        constexpr double kSampleStep = 0.01;
        double a = from;
        double ga = g(a);
        while (a < to) {
            const double b = std::min(a + kSampleStep, to);
            const double gb = g(b);
            if (ga == 0.0) {
                centers.push_back(a);
            } else if (ga * gb < 0.0) {
                centers.push_back(bisect(a, b, ga));
            }
            a = b;
            ga = gb;
        }
    };

    const double lower = kDerivativeStep;
    const double upper = static_cast<double>(params.levels) - 2.0;
    const double switch_point = static_cast<double>(params.n_switch);
    if (switch_point >= upper) {
        scan(lower, upper);
    } else {
        scan(lower, std::nextafter(switch_point, 0.0));
        scan(switch_point, upper);
    }
    return centers;
}

bool is_stable_center(double n0, const ModelParams& params) {
    return coupling_continuous(n0, params) * coupling_second_derivative(n0, params) < 0.0;
}

double small_oscillation_frequency(double n0, const ModelParams& params) {
    const double f = coupling_continuous(n0, params);
    const double f2 = coupling_second_derivative(n0, params);
    if (f * f2 > 0.0) {
        throw PreconditionError(
            fmt::format("small_oscillation_frequency: n0 = {} is not a stable center", n0));
    }
    return 2.0 * std::sqrt(std::abs(f * f2));
}

std::vector<std::size_t> blocked_levels(const CouplingChain& chain, double eps) {
    if (!(eps >= 0.0)) throw DomainError("blocked_levels: eps must be >= 0");
    const double threshold = eps * chain.max_coupling();
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < chain.off_diagonal.size(); ++n) {
        if (std::abs(chain.off_diagonal[n]) <= threshold) out.push_back(n);
    }
    return out;
}

double blocking_parameter(std::size_t level, std::size_t root, const ModelParams& base) {
    const double b = bessel_j1_zero(root);
    const double guess = b * b / (2.0 * (static_cast<double>(level) + 1.0));
    ModelParams p = base;
    p.v0 = 1.0;
    p.levels = std::max(base.levels, level + 2);
    const auto f = [&](double h) {
        p.h = h;
        return coupling(level, p);
    };
    double lo = 0.9 * guess;
    double hi = 1.1 * guess;
    double flo = f(lo);
    if (flo * f(hi) > 0.0) {
        throw NumericalError(fmt::format("blocking_parameter: no sign change near h = {}", guess));
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * guess; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    // endpoint with the smaller residual
    return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

}  // namespace cyclores
