#include "klkit/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "klkit/special_fn.hpp"

namespace klkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2Pi = 1.8378770664093454836;

double log_std_normal(double z) { return -0.5 * z * z - 0.5 * kLn2Pi; }

// log Phi(x), stable far into the left tail (continued Mills expansion).
double log_std_normal_cdf(double x) {
  if (x > -8.0) return std::log(std_normal_cdf(x));
  const double inv2 = 1.0 / (x * x);
  // Phi(x) = phi(x)/(-x) (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...)
  const double series = 1.0 - inv2 * (1.0 - inv2 * (3.0 - inv2 * 15.0));
  return log_std_normal(x) - std::log(-x) + std::log(series);
}

int as_index(double v, const char* what) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) throw std::domain_error(std::string(what) + ": expected an integer");
  return static_cast<int>(r);
}

void need(bool cond, const char* what) {
  if (!cond) throw std::domain_error(what);
}

// Bin index of u in the histogram partition {((i-1)/m, i/m]}, with u = 0
// assigned to bin 1.  Returns 0 when u is outside [0, 1].
int histogram_bin(double u, int m) {
  if (u < 0.0 || u > 1.0) return 0;
  if (u == 0.0) return 1;
  return static_cast<int>(std::ceil(u * m - 1e-12));
}

double log_binomial(int n, int k) {
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

}  // namespace

const char* family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::skew_normal: return "skew_normal";
    case KernelFamily::mv_normal: return "mv_normal";
    case KernelFamily::double_exponential: return "double_exponential";
    case KernelFamily::logistic: return "logistic";
    case KernelFamily::student_t: return "t";
    case KernelFamily::histogram: return "histogram";
    case KernelFamily::triangular: return "triangular";
    case KernelFamily::bernstein: return "bernstein";
    case KernelFamily::lognormal: return "lognormal";
    case KernelFamily::weibull: return "weibull";
    case KernelFamily::gamma: return "gamma";
    case KernelFamily::inverse_gamma: return "inverse_gamma";
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::scaled_uniform: return "scaled_uniform";
  }
  return "?";
}

std::optional<KernelFamily> family_from_name(std::string_view name) {
  if (name == "skew_normal" || name == "normal") return KernelFamily::skew_normal;
  if (name == "mv_normal") return KernelFamily::mv_normal;
  if (name == "double_exponential" || name == "laplace") return KernelFamily::double_exponential;
  if (name == "logistic") return KernelFamily::logistic;
  if (name == "t" || name == "student_t") return KernelFamily::student_t;
  if (name == "histogram") return KernelFamily::histogram;
  if (name == "triangular") return KernelFamily::triangular;
  if (name == "bernstein") return KernelFamily::bernstein;
  if (name == "lognormal") return KernelFamily::lognormal;
  if (name == "weibull") return KernelFamily::weibull;
  if (name == "gamma") return KernelFamily::gamma;
  if (name == "inverse_gamma") return KernelFamily::inverse_gamma;
  if (name == "exponential") return KernelFamily::exponential;
  if (name == "scaled_uniform") return KernelFamily::scaled_uniform;
  return std::nullopt;
}

int theta_arity(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::mv_normal: return spec.dim;
    case KernelFamily::gamma:
    case KernelFamily::inverse_gamma: return 2;
    default: return 1;
  }
}

int phi_arity(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::gamma:
    case KernelFamily::inverse_gamma:
    case KernelFamily::exponential:
    case KernelFamily::scaled_uniform: return 0;
    default: return 1;
  }
}

Support kernel_sample_support(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::histogram:
    case KernelFamily::triangular:
    case KernelFamily::bernstein: return Support::unit_interval;
    case KernelFamily::lognormal:
    case KernelFamily::weibull:
    case KernelFamily::gamma:
    case KernelFamily::inverse_gamma:
    case KernelFamily::exponential:
    case KernelFamily::scaled_uniform: return Support::positive_half_line;
    default: return Support::real_line;
  }
}

double kernel_log_eval(const KernelSpec& spec, std::span<const double> x,
                       std::span<const double> theta, std::span<const double> phi) {
  if (static_cast<int>(theta.size()) != theta_arity(spec)) {
    throw std::domain_error("kernel: theta arity mismatch");
  }
  if (static_cast<int>(phi.size()) != phi_arity(spec)) {
    throw std::domain_error("kernel: phi arity mismatch");
  }

  switch (spec.family) {
    case KernelFamily::skew_normal: {
      const double h = phi[0];
      need(h > 0.0, "skew_normal: scale must be positive");
      const double z = (x[0] - theta[0]) / h;
      double lp = std::log(2.0) + log_std_normal(z) + log_std_normal_cdf(spec.lambda * z);
      if (spec.lambda == 0.0) lp = log_std_normal(z);  // plain normal, no CDF factor
      return lp - std::log(h);
    }
    case KernelFamily::mv_normal: {
      const double h = phi[0];
      need(h > 0.0, "mv_normal: scale must be positive");
      need(static_cast<int>(x.size()) == spec.dim, "mv_normal: point dimension mismatch");
      double lp = 0.0;
      for (int i = 0; i < spec.dim; ++i) lp += log_std_normal((x[i] - theta[i]) / h);
      return lp - spec.dim * std::log(h);
    }
    case KernelFamily::double_exponential: {
      const double h = phi[0];
      need(h > 0.0, "double_exponential: scale must be positive");
      const double z = (x[0] - theta[0]) / h;
      return -std::abs(z) - std::log(2.0) - std::log(h);
    }
    case KernelFamily::logistic: {
      const double h = phi[0];
      need(h > 0.0, "logistic: scale must be positive");
      const double z = std::abs((x[0] - theta[0]) / h);
      return -z - 2.0 * std::log1p(std::exp(-z)) - std::log(h);
    }
    case KernelFamily::student_t: {
      const double h = phi[0];
      need(h > 0.0, "t: scale must be positive");
      need(spec.nu > 0.0, "t: nu must be positive");
      const double z = (x[0] - theta[0]) / h;
      const double nu = spec.nu;
      return log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * M_PI)
             - 0.5 * (nu + 1.0) * std::log1p(z * z / nu) - std::log(h);
    }
    case KernelFamily::histogram: {
      const int m = as_index(phi[0], "histogram bin count");
      need(m >= 1, "histogram: bin count must be >= 1");
      need(theta[0] >= 0.0 && theta[0] <= 1.0, "histogram: theta must lie in [0,1]");
      const int bx = histogram_bin(x[0], m);
      const int bt = histogram_bin(theta[0], m);
      return (bx != 0 && bx == bt) ? std::log(static_cast<double>(m)) : -kInf;
    }
    case KernelFamily::triangular: {
      const int n = as_index(phi[0], "triangular resolution");
      const int m = as_index(theta[0], "triangular index");
      need(n >= 1, "triangular: resolution must be >= 1");
      need(m >= 0 && m <= n, "triangular: index must lie in 0..n");
      const double u = x[0];
      if (u < 0.0 || u > 1.0) return -kInf;
      const double dn = n;
      double v = 0.0;
      if (m == 0) {
        v = (u <= 1.0 / dn) ? 2.0 * dn - 2.0 * dn * dn * u : 0.0;
      } else if (m == n) {
        // stated on (0, 1/n) in the source, but only ((n-1)/n, 1] integrates to 1
        v = (u >= 1.0 - 1.0 / dn) ? 2.0 * dn + 2.0 * dn * dn * (u - 1.0) : 0.0;
      } else {
        v = dn - dn * dn * std::abs(u - m / dn);
      }
      return v > 0.0 ? std::log(v) : -kInf;
    }
    case KernelFamily::bernstein: {
      const int k = as_index(phi[0], "bernstein degree");
      const int j = as_index(theta[0], "bernstein index");
      need(k >= 0, "bernstein: degree must be >= 0");
      need(j >= 0 && j <= k, "bernstein: index must lie in 0..k");
      const double u = x[0];
      if (u < 0.0 || u > 1.0) return -kInf;
      double lp = std::log(k + 1.0) + log_binomial(k, j);
      if (j > 0) lp += u > 0.0 ? j * std::log(u) : -kInf;
      if (k - j > 0) lp += u < 1.0 ? (k - j) * std::log1p(-u) : -kInf;
      return lp;
    }
    case KernelFamily::lognormal: {
      const double s = phi[0];
      need(s > 0.0, "lognormal: scale must be positive");
      if (!(x[0] > 0.0)) return -kInf;
      const double z = (std::log(x[0]) - theta[0]) / s;
      return -0.5 * z * z - 0.5 * kLn2Pi - std::log(s) - std::log(x[0]);
    }
    case KernelFamily::weibull: {
      const double shape = theta[0], scale = phi[0];
      need(shape > 0.0, "weibull: shape must be positive");
      need(scale > 0.0, "weibull: scale must be positive");
      if (x[0] < 0.0) return -kInf;
      if (x[0] == 0.0) {
        if (shape > 1.0) return -kInf;
        if (shape == 1.0) return -std::log(scale);
        return kInf;  // integrable singularity at the origin
      }
      return std::log(shape) - std::log(scale) + (shape - 1.0) * std::log(x[0])
             - std::pow(x[0], shape) / scale;
    }
    case KernelFamily::gamma: {
      const double a = theta[0], b = theta[1];
      need(a > 0.0, "gamma: shape must be positive");
      need(b > 0.0, "gamma: scale must be positive");
      if (!(x[0] > 0.0)) {
        if (x[0] == 0.0 && a < 1.0) return kInf;
        if (x[0] == 0.0 && a == 1.0) return -std::log(b);
        return -kInf;
      }
      return (a - 1.0) * std::log(x[0]) - x[0] / b - log_gamma(a) - a * std::log(b);
    }
    case KernelFamily::inverse_gamma: {
      const double k = theta[0], z = theta[1];
      need(k > 0.0, "inverse_gamma: shape must be positive");
      need(z > 0.0, "inverse_gamma: location must be positive");
      if (!(x[0] > 0.0)) return -kInf;
      const double b = k * z;
      return k * std::log(b) - log_gamma(k) - (k + 1.0) * std::log(x[0]) - b / x[0];
    }
    case KernelFamily::exponential: {
      const double rate = theta[0];
      need(rate > 0.0, "exponential: rate must be positive");
      if (x[0] < 0.0) return -kInf;
      return std::log(rate) - rate * x[0];
    }
    case KernelFamily::scaled_uniform: {
      const double w = theta[0];
      need(w > 0.0, "scaled_uniform: width must be positive");
      return (x[0] >= 0.0 && x[0] <= w) ? -std::log(w) : -kInf;
    }
  }
  throw std::domain_error("kernel: unknown family");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> theta, std::span<const double> phi) {
  const double lp = kernel_log_eval(spec, x, theta, phi);
  if (lp == -kInf) return 0.0;
  if (lp == kInf) return kInf;
  return std::exp(lp);
}

double kernel_eval(const KernelSpec& spec, double x,
                   std::span<const double> theta, std::span<const double> phi) {
  return kernel_eval(spec, std::span<const double>(&x, 1), theta, phi);
}

double kernel_log_eval(const KernelSpec& spec, double x,
                       std::span<const double> theta, std::span<const double> phi) {
  return kernel_log_eval(spec, std::span<const double>(&x, 1), theta, phi);
}

LocationScaleView to_location_scale(const KernelSpec& spec) {
  LocationScaleView view;
  view.source = spec.family;
  switch (spec.family) {
    case KernelFamily::skew_normal:
      view.lambda = spec.lambda;
      return view;
    case KernelFamily::mv_normal:
      view.dimension = spec.dim;
      return view;
    case KernelFamily::double_exponential:
    case KernelFamily::logistic:
      return view;
    case KernelFamily::student_t:
      view.nu = spec.nu;
      return view;
    case KernelFamily::lognormal:
      // log-scale reduction: standard normal base
      view.source = KernelFamily::lognormal;
      return view;
    case KernelFamily::weibull:
      return view;
    default:
      throw std::invalid_argument(std::string("to_location_scale: '") + family_name(spec.family) +
                                  "' has no location-scale form");
  }
}

double LocationScaleView::log_density1(double z) const {
  switch (source) {
    case KernelFamily::skew_normal:
      if (lambda == 0.0) return log_std_normal(z);
      return std::log(2.0) + log_std_normal(z) + log_std_normal_cdf(lambda * z);
    case KernelFamily::mv_normal:
    case KernelFamily::lognormal:
      return log_std_normal(z);
    case KernelFamily::double_exponential:
      return -std::abs(z) - std::log(2.0);
    case KernelFamily::logistic: {
      const double a = std::abs(z);
      return -a - 2.0 * std::log1p(std::exp(-a));
    }
    case KernelFamily::student_t:
      return log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * M_PI)
             - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
    case KernelFamily::weibull:
      return z - std::exp(z);  // W(z) = exp(z - e^z)
    default:
      throw std::invalid_argument("LocationScaleView: unsupported base");
  }
}

double LocationScaleView::log_density(std::span<const double> z) const {
  if (source == KernelFamily::mv_normal) {
    double lp = 0.0;
    for (int i = 0; i < dimension; ++i) lp += log_std_normal(z[i]);
    return lp;
  }
  return log_density1(z[0]);
}

double LocationScaleView::density(std::span<const double> z) const {
  return std::exp(log_density(z));
}

double LocationScaleView::density1(double z) const { return std::exp(log_density1(z)); }

double LocationScaleView::score1(double z) const {
  switch (source) {
    case KernelFamily::skew_normal: {
      if (lambda == 0.0) return -z;
      const double u = lambda * z;
      const double hazard = std::exp(log_std_normal(u) - log_std_normal_cdf(u));
      return -z + lambda * hazard;
    }
    case KernelFamily::mv_normal:
    case KernelFamily::lognormal:
      return -z;
    case KernelFamily::double_exponential:
      if (z == 0.0) throw std::domain_error("score: double_exponential not differentiable at 0");
      return z > 0.0 ? -1.0 : 1.0;
    case KernelFamily::logistic:
      return -std::tanh(0.5 * z);
    case KernelFamily::student_t:
      return -(nu + 1.0) * z / (nu + z * z);
    case KernelFamily::weibull:
      return 1.0 - std::exp(z);
    default:
      throw std::invalid_argument("LocationScaleView: unsupported base");
  }
}

std::vector<double> LocationScaleView::score(std::span<const double> z) const {
  if (source == KernelFamily::mv_normal) {
    std::vector<double> s(z.begin(), z.end());
    for (double& v : s) v = -v;
    return s;
  }
  return {score1(z[0])};
}

std::vector<double> score_ratio(const LocationScaleView& view, std::span<const double> z) {
  return view.score(z);
}

double score_ratio1(const LocationScaleView& view, double z) { return view.score1(z); }

}  // namespace klkit
