#pragma once

namespace klkit {

// ln Gamma(x) for x > 0.  Throws std::domain_error outside the domain.
double log_gamma(double x);

// Digamma psi0(x) for x > 0: upward recurrence into the asymptotic regime,
// then the Bernoulli-number series.
double digamma(double x);

// Solves psi0(a) = y for a > 0 (monotone bisection with bracket expansion).
double inverse_digamma(double y);

double std_normal_pdf(double x);
double std_normal_cdf(double x);

// Regularized lower incomplete gamma P(shape, x) with unit rate:
// series expansion for x < shape + 1, continued fraction otherwise.
double gamma_cdf(double x, double shape);

// Exponent convention in the x >= 1 branch of the gamma-kernel envelope.
// The two source displays disagree: `consistent_with_35` uses exp(3/2 - 1/(12x)),
// `as_printed` keeps exp(3/2 - 12/x).  The first is the default.
enum class EnvelopeVariant { consistent_with_35, as_printed };

struct EnvelopeParams {
  double delta = 0.25;  // window half-width, 0 < delta < 1/2
  EnvelopeVariant exponent_variant = EnvelopeVariant::consistent_with_35;
};

// Lower envelope C(x) for the gamma-kernel window mass: the x < 1 branch is
// x^2 / (2 delta (1+delta) sqrt(2+delta)) * exp(-1/(12x) - 2(1+delta)delta^2/x^2),
// the x >= 1 branch is delta exp(...) / (2 sqrt(2 pi (x+delta))) * exp(-x delta^2 / (8(x-delta)^2)).
// Throws std::domain_error for x <= 0 or delta outside (0, 1/2).
double lemma8_envelope(double x, const EnvelopeParams& params = {});

// Gaussian-gap envelope for the inverse-gamma window mass:
// {Phi(1 + delta/x) - Phi(1)}/2 for 0 < x < 1, {Phi(1) - Phi(1 - delta/x)}/2 for x >= 1.
double normal_gap_envelope(double x, double delta);

}  // namespace klkit
