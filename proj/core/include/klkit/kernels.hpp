#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "klkit/densities.hpp"

namespace klkit {

enum class KernelFamily {
  skew_normal,
  mv_normal,
  double_exponential,
  logistic,
  student_t,
  histogram,
  triangular,
  bernstein,
  lognormal,
  weibull,
  gamma,
  inverse_gamma,
  exponential,
  scaled_uniform,
};

const char* family_name(KernelFamily family);
std::optional<KernelFamily> family_from_name(std::string_view name);

// Family plus its fixed hyper-parameters.  Mixing parameters are passed per
// call; the (theta, phi) layout per family is:
//   skew_normal / double_exponential / logistic / student_t:
//       theta = {location},     phi = {scale h > 0}
//   mv_normal(dim):
//       theta = {loc_1..loc_d}, phi = {scale h > 0}
//   histogram:    theta = {t in [0,1]},      phi = {bin count m >= 1}
//   triangular:   theta = {index m in 0..n}, phi = {resolution n >= 1}
//   bernstein:    theta = {index j in 0..k}, phi = {degree k >= 0}
//   lognormal:    theta = {log-location},    phi = {log-scale > 0}
//   weibull:      theta = {shape > 0},       phi = {scale > 0}
//   gamma:          theta = {shape > 0, scale > 0},        phi = {}
//   inverse_gamma:  theta = {shape k > 0, location z > 0}, phi = {}
//   exponential:    theta = {rate > 0},                    phi = {}
//   scaled_uniform: theta = {width > 0},                   phi = {}
struct KernelSpec {
  KernelFamily family = KernelFamily::skew_normal;
  double lambda = 0.0;  // skew_normal slant
  double nu = 1.0;      // student_t degrees of freedom
  int dim = 1;          // mv_normal dimension (1..3)
};

int theta_arity(const KernelSpec& spec);
int phi_arity(const KernelSpec& spec);
Support kernel_sample_support(const KernelSpec& spec);

// Density value / log-density of K(x; theta, phi).  Points outside the sample
// space give 0 (log: -inf); invalid parameters throw std::domain_error.
double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> theta, std::span<const double> phi);
double kernel_log_eval(const KernelSpec& spec, std::span<const double> x,
                       std::span<const double> theta, std::span<const double> phi);
double kernel_eval(const KernelSpec& spec, double x,
                   std::span<const double> theta, std::span<const double> phi);
double kernel_log_eval(const KernelSpec& spec, double x,
                       std::span<const double> theta, std::span<const double> phi);

// Location-scale reduction K(x; theta, h) = h^{-d} chi((x - theta)/h).
// Supported for the five chi-form families plus the log-scale reductions
// (lognormal -> standard normal base, weibull -> W(z) = exp(z - e^z)).
// Other families throw std::invalid_argument.
struct LocationScaleView {
  KernelFamily source = KernelFamily::skew_normal;
  int dimension = 1;
  double lambda = 0.0;
  double nu = 1.0;

  double log_density(std::span<const double> z) const;
  double density(std::span<const double> z) const;
  // Per-coordinate score chi_i'(z)/chi(z).  Throws std::domain_error at
  // non-differentiable points (double_exponential at 0).
  std::vector<double> score(std::span<const double> z) const;

  double log_density1(double z) const;
  double density1(double z) const;
  double score1(double z) const;
};

LocationScaleView to_location_scale(const KernelSpec& spec);

std::vector<double> score_ratio(const LocationScaleView& view, std::span<const double> z);
double score_ratio1(const LocationScaleView& view, double z);

}  // namespace klkit
