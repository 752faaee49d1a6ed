#include "cyclores/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "cyclores/errors.hpp"

namespace cyclores {
namespace {

constexpr double kMillerLimit = 50.0;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite argument");
}

// J0 and J1 together by backward recurrence from an even start order well above x.
std::pair<double, double> miller_j0_j1(double x) {
    const int start = 2 * (static_cast<int>(0.6 * x) + 20);
    double next = 0.0;     // J_{k+1}
    double current = 1e-30;  // J_k, arbitrary scale
    double even_sum = 0.0;   // sum of J_2k for k >= 1
    double j0 = 0.0;
    double j1 = 0.0;
    for (int k = start; k > 0; --k) {
        const double previous = 2.0 * k / x * current - next;  // J_{k-1}
        next = current;
        current = previous;
        if (std::abs(current) > 1e250) {  // rescale to stay in range
            current *= 1e-250;
            next *= 1e-250;
            even_sum *= 1e-250;
            j1 *= 1e-250;
        }
        if (k - 1 == 1) j1 = current;
        if ((k - 1) % 2 == 0 && k - 1 > 0) even_sum += current;
    }
    j0 = current;
    const double norm = j0 + 2.0 * even_sum;
    return {j0 / norm, j1 / norm};
}

// Hankel expansion of J_nu for large x, nu in {0, 1}.
double hankel_j(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    const double eight_x = 8.0 * x;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * eight_x);
        if (std::abs(term) < 1e-17) break;
        if (k % 2 == 1) {
            q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        } else {
            p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        }
    }
    const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// (nu+1) * 1F1(-nu; 2; x), convergent and cancellation-free for small |nu|.
long double laguerre_l1_series(long double nu, long double x) {
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 0; k < 500; ++k) {
        term *= (k - nu) * x / ((k + 2.0L) * (k + 1.0L));
        sum += term;
        if (std::abs(term) <= 1e-21L * std::abs(sum)) break;
    }
    return (nu + 1.0L) * sum;
}

}  // namespace

double bessel_j0(double x) {
    require_finite(x, "bessel_j0");
    const double ax = std::abs(x);
    if (ax < 1e-8) return 1.0 - 0.25 * ax * ax;
    if (ax > kMillerLimit) return hankel_j(0, ax);
    return miller_j0_j1(ax).first;
}

double bessel_j1(double x) {
    require_finite(x, "bessel_j1");
    const double ax = std::abs(x);
    double value = 0.0;
    if (ax < 1e-8) {
        value = 0.5 * ax;
    } else if (ax > kMillerLimit) {
        value = hankel_j(1, ax);
    } else {
        value = miller_j0_j1(ax).second;
    }
    return x < 0.0 ? -value : value;
}

double bessel_j1_zero(std::size_t k) {
    if (k == 0) throw DomainError("bessel_j1_zero: roots are numbered from 1");
    const double beta = (static_cast<double>(k) + 0.25) * std::numbers::pi;
    const double b8 = 8.0 * beta;
    // McMahon, mu = 4
    double x = beta - 3.0 / b8 + 36.0 / (3.0 * b8 * b8 * b8);
    for (int it = 0; it < 50; ++it) {
        const double j1 = bessel_j1(x);
        const double derivative = bessel_j0(x) - j1 / x;
        const double step = j1 / derivative;
        x -= step;
        if (std::abs(step) < 1e-15 * x) break;
    }
    return x;
}

double laguerre_l1(long n, double x) {
    if (n < 0) throw DomainError("laguerre_l1: negative degree");
    require_finite(x, "laguerre_l1");
    if (x < 0.0) throw DomainError("laguerre_l1: negative argument");
    double previous = 1.0;  // L_0
    if (n == 0) return previous;
    double current = 2.0 - x;  // L_1
    for (long k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 2.0 - x) * current - (k + 1.0) * previous) / (k + 1.0);
        previous = current;
        current = next;
    }
    return current;
}

double laguerre_l1(double nu, double x) {
    require_finite(nu, "laguerre_l1");
    require_finite(x, "laguerre_l1");
    if (nu <= -1.0) throw DomainError("laguerre_l1: degree must exceed -1");
    if (x < 0.0) throw DomainError("laguerre_l1: negative argument");
    if (nu < 1.0) return static_cast<double>(laguerre_l1_series(nu, x));

    const double whole = std::floor(nu);
    const long double frac = static_cast<long double>(nu) - whole;
    long double previous = laguerre_l1_series(frac, x);
    long double current = laguerre_l1_series(frac + 1.0L, x);
    for (long double degree = frac + 1.0L; degree < nu - 0.5; degree += 1.0L) {
        const long double next =
            ((2.0L * degree + 2.0L - x) * current - (degree + 1.0L) * previous) / (degree + 1.0L);
        previous = current;
        current = next;
    }
    return static_cast<double>(current);
}

}  // namespace cyclores
