#include "klkit/special_fn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace klkit {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLn2Pi = 1.8378770664093454836;

// Bernoulli-series tail of psi0, valid once x is large (used for x >= 10).
double digamma_asymptotic(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // ln x - 1/(2x) - sum B_{2n} / (2n x^{2n}), truncated after x^{-12}.
  double series = inv2 * (1.0 / 12.0
                - inv2 * (1.0 / 120.0
                - inv2 * (1.0 / 252.0
                - inv2 * (1.0 / 240.0
                - inv2 * (1.0 / 132.0
                - inv2 * (691.0 / 32760.0))))));
  return std::log(x) - 0.5 * inv - series;
}

// Lower regularized incomplete gamma by power series, x < shape + 1.
double gamma_p_series(double x, double shape) {
  double term = 1.0 / shape;
  double sum = term;
  for (int n = 1; n < 600; ++n) {
    term *= x / (shape + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(shape * std::log(x) - x - log_gamma(shape));
}

// Upper regularized incomplete gamma by Lentz continued fraction, x >= shape + 1.
double gamma_q_contfrac(double x, double shape) {
  const double tiny = 1e-300;
  double b = x + 1.0 - shape;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 600; ++i) {
    const double an = -static_cast<double>(i) * (i - shape);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(shape * std::log(x) - x - log_gamma(shape));
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
  return std::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: requires x > 0");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;  // psi0(x) = psi0(x + 1) - 1/x
    x += 1.0;
  }
  return acc + digamma_asymptotic(x);
}

double inverse_digamma(double y) {
  // psi0 is strictly increasing on (0, inf) with range all of R.
  double lo = 1e-12, hi = 1.0;
  while (digamma(hi) < y) hi *= 2.0;
  while (digamma(lo) > y) lo *= 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (digamma(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x - 0.5 * kLn2Pi);
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / kSqrt2);
}

double gamma_cdf(double x, double shape) {
  if (!(shape > 0.0)) throw std::domain_error("gamma_cdf: requires shape > 0");
  if (!(x >= 0.0)) throw std::domain_error("gamma_cdf: requires x >= 0");
  if (x == 0.0) return 0.0;
  if (x < shape + 1.0) return gamma_p_series(x, shape);
  return 1.0 - gamma_q_contfrac(x, shape);
}

double lemma8_envelope(double x, const EnvelopeParams& params) {
  const double d = params.delta;
  if (!(x > 0.0)) throw std::domain_error("lemma8_envelope: requires x > 0");
  if (!(d > 0.0 && d < 0.5)) throw std::domain_error("lemma8_envelope: requires 0 < delta < 1/2");
  if (x < 1.0) {
    const double pre = x * x / (2.0 * d * (1.0 + d) * std::sqrt(2.0 + d));
    return pre * std::exp(-1.0 / (12.0 * x) - 2.0 * (1.0 + d) * d * d / (x * x));
  }
  const double expo = (params.exponent_variant == EnvelopeVariant::consistent_with_35)
                          ? 1.5 - 1.0 / (12.0 * x)
                          : 1.5 - 12.0 / x;
  const double gap = x - d;
  return d * std::exp(expo) / (2.0 * std::sqrt(2.0 * M_PI * (x + d)))
         * std::exp(-x * d * d / (8.0 * gap * gap));
}

double normal_gap_envelope(double x, double delta) {
  if (!(x > 0.0)) throw std::domain_error("normal_gap_envelope: requires x > 0");
  if (!(delta > 0.0)) throw std::domain_error("normal_gap_envelope: requires delta > 0");
  if (x < 1.0) return 0.5 * (std_normal_cdf(1.0 + delta / x) - std_normal_cdf(1.0));
  return 0.5 * (std_normal_cdf(1.0) - std_normal_cdf(1.0 - delta / x));
}

}  // namespace klkit
