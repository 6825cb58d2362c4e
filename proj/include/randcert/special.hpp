#pragma once

namespace randcert {

// ln Gamma(x) for x > 0. Upward recurrence to x >= 10, then the Stirling
// series with eight Bernoulli terms. Throws DomainError for x <= 0 or NaN.
double log_gamma(double x);

// Trigamma psi_1(x) = d^2/dx^2 ln Gamma(x) for x > 0, via
// psi_1(x) = psi_1(x + 1) + 1/x^2 lifted to x >= 10 and the asymptotic series
// 1/x + 1/(2x^2) + sum B_2k / x^(2k+1).
double polygamma1(double x);

}  // namespace randcert
