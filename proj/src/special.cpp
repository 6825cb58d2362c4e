#include "randcert/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "randcert/errors.hpp"

namespace randcert {

namespace {

constexpr double kAsymptoticFrom = 10.0;

void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || std::isinf(x)) {
    throw DomainError(std::string(fn) + " requires a finite x > 0, got " + std::to_string(x));
  }
}

// B_2k / (2k (2k-1)), k = 1..8
constexpr double kStirling[] = {
    1.0 / 12.0,         -1.0 / 360.0,       1.0 / 1260.0,           -1.0 / 1680.0,
    1.0 / 1188.0,       -691.0 / 360360.0,  1.0 / 156.0,            -3617.0 / 122400.0,
};

// B_2k, k = 1..8
constexpr double kBernoulli[] = {
    1.0 / 6.0,   -1.0 / 30.0,     1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0,  -691.0 / 2730.0, 7.0 / 6.0,  -3617.0 / 510.0,
};

double stirling_log_gamma(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (int k = 7; k >= 0; --k) series = series * inv2 + kStirling[k];
  series *= inv;
  constexpr double half_log_two_pi = 0.91893853320467274178;
  return (x - 0.5) * std::log(x) - x + half_log_two_pi + series;
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x >= kAsymptoticFrom) return stirling_log_gamma(x);
  // Gamma(x) = Gamma(x + k) / (x (x+1) ... (x+k-1))
  double product = 1.0;
  double z = x;
  while (z < kAsymptoticFrom) {
    product *= z;
    z += 1.0;
  }
  return stirling_log_gamma(z) - std::log(product);
}

double polygamma1(double x) {
  require_positive(x, "polygamma1");
  double shift = 0.0;
  double z = x;
  while (z < kAsymptoticFrom) {
    shift += 1.0 / (z * z);
    z += 1.0;
  }
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (int k = 7; k >= 0; --k) series = series * inv2 + kBernoulli[k];
  series *= inv2 * inv;
  return shift + inv + 0.5 * inv2 + series;
}

}  // namespace randcert
