#pragma once

#include <cstddef>

namespace cyclores {

/// Bessel function of the first kind, order 0.
double bessel_j0(double x);

/// Bessel function of the first kind, order 1.
///
/// Miller backward recurrence normalised by J0 + 2*sum J_2k = 1 for |x| <= 50,
/// Hankel asymptotic expansion beyond. Absolute error below 1e-12 on |x| <= 50.
/// Throws DomainError for non-finite input.
double bessel_j1(double x);

/// k-th positive zero of J1 (k >= 1), McMahon estimate polished by Newton.
double bessel_j1_zero(std::size_t k);

/// Associated Laguerre polynomial L_n^(1)(x) by the three-term recurrence
/// (k+1) L_{k+1} = (2k+2-x) L_k - (k+1) L_{k-1}.
/// Throws DomainError for negative n or x.
double laguerre_l1(long n, double x);

/// Laguerre function L_nu^(1)(x) for real degree nu > -1, x >= 0.
///
/// Agrees with laguerre_l1 at integer nu. The fractional part is seeded from the
/// confluent series (nu+1) 1F1(-nu; 2; x), then the same recurrence is run in nu.
double laguerre_l1(double nu, double x);

}  // namespace cyclores
