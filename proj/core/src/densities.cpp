#include "klkit/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "klkit/quadrature.hpp"
#include "klkit/special_fn.hpp"

namespace klkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2Pi = 1.8378770664093454836;

double quantile_bisect(const std::function<double(double)>& cdf, double p,
                       double lo, double hi) {
  while (cdf(hi) < p) { lo = hi; hi = hi < 1.0 ? 1.0 : hi * 2.0; if (hi > 1e12) break; }
  while (cdf(lo) > p) { hi = lo; lo = lo > -1.0 ? -1.0 : lo * 2.0; if (lo < -1e12) break; }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double DensitySpec::lo() const {
  switch (support) {
    case Support::real_line: return -kInf;
    case Support::unit_interval: return 0.0;
    case Support::positive_half_line: return 0.0;
  }
  return -kInf;
}

double DensitySpec::hi() const {
  switch (support) {
    case Support::real_line: return kInf;
    case Support::unit_interval: return 1.0;
    case Support::positive_half_line: return kInf;
  }
  return kInf;
}

double DensitySpec::log_eval(double x) const {
  if (log_pdf) return log_pdf(x);
  const double v = pdf(x);
  return v > 0.0 ? std::log(v) : -kInf;
}

void validate_density(const DensitySpec& spec, double tol) {
  if (spec.dimension == 1) {
    QuadOptions opt;
    opt.abs_tol = tol * 1e-2;
    const QuadResult mass = integrate_support(spec.pdf, spec.lo(), spec.hi(), opt);
    if (std::abs(mass.value - 1.0) > tol) {
      throw std::invalid_argument("density '" + spec.name + "': mass " +
                                  std::to_string(mass.value) + " is not 1");
    }
  }
  if (spec.upper_bound && spec.dimension == 1) {
    auto [a, b] = core_interval(spec, 1e-12);
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
      const double x = a + (b - a) * i / n;
      if (spec.pdf(x) > *spec.upper_bound * (1.0 + 1e-12)) {
        throw std::invalid_argument("density '" + spec.name + "': exceeds stated bound at x=" +
                                    std::to_string(x));
      }
    }
  }
}

DensitySpec density_normal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("density_normal: sigma must be positive");
  DensitySpec d;
  d.name = "normal";
  d.support = Support::real_line;
  d.log_pdf = [mu, sigma](double x) {
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - 0.5 * kLn2Pi - std::log(sigma);
  };
  d.pdf = [lp = d.log_pdf](double x) { return std::exp(lp(x)); };
  d.upper_bound = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  d.cdf = [mu, sigma](double x) { return std_normal_cdf((x - mu) / sigma); };
  validate_density(d);
  return d;
}

DensitySpec density_uniform01() {
  DensitySpec d;
  d.name = "uniform";
  d.support = Support::unit_interval;
  d.pdf = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
  d.log_pdf = [](double x) { return (x >= 0.0 && x <= 1.0) ? 0.0 : -kInf; };
  d.upper_bound = 1.0;
  d.cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  validate_density(d);
  return d;
}

DensitySpec density_exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("density_exponential: rate must be positive");
  DensitySpec d;
  d.name = "exp";
  d.support = Support::positive_half_line;
  d.pdf = [rate](double x) { return x >= 0.0 ? rate * std::exp(-rate * x) : 0.0; };
  d.log_pdf = [rate](double x) { return x >= 0.0 ? std::log(rate) - rate * x : -kInf; };
  d.upper_bound = rate;
  d.cdf = [rate](double x) { return x > 0.0 ? 1.0 - std::exp(-rate * x) : 0.0; };
  validate_density(d);
  return d;
}

DensitySpec density_gamma(double shape, double rate) {
  if (!(shape > 0.0 && rate > 0.0)) {
    throw std::invalid_argument("density_gamma: shape and rate must be positive");
  }
  DensitySpec d;
  d.name = "gamma";
  d.support = Support::positive_half_line;
  const double lg = log_gamma(shape);
  d.log_pdf = [shape, rate, lg](double x) {
    if (!(x > 0.0)) return -kInf;
    return shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x - lg;
  };
  d.pdf = [lp = d.log_pdf](double x) { const double v = lp(x); return v > -700.0 ? std::exp(v) : 0.0; };
  if (shape >= 1.0) {
    const double mode = (shape - 1.0) / rate;
    d.upper_bound = shape > 1.0 ? d.pdf(mode) : rate;
  }
  d.cdf = [shape, rate](double x) { return x > 0.0 ? gamma_cdf(rate * x, shape) : 0.0; };
  validate_density(d);
  return d;
}

DensitySpec density_cauchy(double loc, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("density_cauchy: scale must be positive");
  DensitySpec d;
  d.name = "cauchy";
  d.support = Support::real_line;
  d.pdf = [loc, scale](double x) {
    const double z = (x - loc) / scale;
    return 1.0 / (M_PI * scale * (1.0 + z * z));
  };
  d.upper_bound = 1.0 / (M_PI * scale);
  d.cdf = [loc, scale](double x) { return 0.5 + std::atan((x - loc) / scale) / M_PI; };
  validate_density(d);
  return d;
}

DensitySpec density_laplace(double loc, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("density_laplace: scale must be positive");
  DensitySpec d;
  d.name = "laplace";
  d.support = Support::real_line;
  d.log_pdf = [loc, scale](double x) {
    return -std::abs(x - loc) / scale - std::log(2.0 * scale);
  };
  d.pdf = [lp = d.log_pdf](double x) { return std::exp(lp(x)); };
  d.upper_bound = 0.5 / scale;
  d.cdf = [loc, scale](double x) {
    const double z = (x - loc) / scale;
    return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
  };
  validate_density(d);
  return d;
}

DensitySpec density_lognormal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("density_lognormal: sigma must be positive");
  DensitySpec d;
  d.name = "lognormal";
  d.support = Support::positive_half_line;
  d.log_pdf = [mu, sigma](double x) {
    if (!(x > 0.0)) return -kInf;
    const double z = (std::log(x) - mu) / sigma;
    return -0.5 * z * z - 0.5 * kLn2Pi - std::log(sigma) - std::log(x);
  };
  d.pdf = [lp = d.log_pdf](double x) { const double v = lp(x); return v > -700.0 ? std::exp(v) : 0.0; };
  d.upper_bound = std::exp(sigma * sigma / 2.0 - mu) / (sigma * std::sqrt(2.0 * M_PI));
  d.cdf = [mu, sigma](double x) { return x > 0.0 ? std_normal_cdf((std::log(x) - mu) / sigma) : 0.0; };
  validate_density(d);
  return d;
}

DensitySpec density_parabolic() {
  DensitySpec d;
  d.name = "parabolic";
  d.support = Support::unit_interval;
  d.pdf = [](double x) { return (x >= 0.0 && x <= 1.0) ? 6.0 * x * (1.0 - x) : 0.0; };
  d.upper_bound = 1.5;
  d.cdf = [](double x) {
    const double t = std::clamp(x, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
  };
  validate_density(d);
  return d;
}

DensitySpec density_pareto() {
  DensitySpec d;
  d.name = "pareto";
  d.support = Support::positive_half_line;
  d.pdf = [](double x) { return x >= 0.0 ? 2.0 / std::pow(1.0 + x, 3) : 0.0; };
  d.upper_bound = 2.0;
  d.cdf = [](double x) { return x > 0.0 ? 1.0 - 1.0 / ((1.0 + x) * (1.0 + x)) : 0.0; };
  validate_density(d);
  return d;
}

DensitySpec density_normal_mixture2(double p, double mu1, double sigma1,
                                    double mu2, double sigma2) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("density_normal_mixture2: p in (0,1)");
  if (!(sigma1 > 0.0 && sigma2 > 0.0)) {
    throw std::invalid_argument("density_normal_mixture2: sigmas must be positive");
  }
  DensitySpec d;
  d.name = "normal_mix";
  d.support = Support::real_line;
  d.pdf = [=](double x) {
    return p * std_normal_pdf((x - mu1) / sigma1) / sigma1 +
           (1.0 - p) * std_normal_pdf((x - mu2) / sigma2) / sigma2;
  };
  d.cdf = [=](double x) {
    return p * std_normal_cdf((x - mu1) / sigma1) + (1.0 - p) * std_normal_cdf((x - mu2) / sigma2);
  };
  validate_density(d);
  return d;
}

DensitySpec density_mv_normal(int dimension) {
  if (dimension < 1 || dimension > 3) {
    throw std::invalid_argument("density_mv_normal: dimension must be in 1..3");
  }
  DensitySpec d;
  d.name = "mv_normal";
  d.support = Support::real_line;
  d.dimension = dimension;
  d.pdf = [](double x) { return std_normal_pdf(x); };  // per-axis marginal
  d.pdf_nd = [dimension](std::span<const double> x) {
    double lp = 0.0;
    for (int i = 0; i < dimension; ++i) lp += -0.5 * x[i] * x[i] - 0.5 * kLn2Pi;
    return std::exp(lp);
  };
  d.cdf = [](double x) { return std_normal_cdf(x); };
  if (dimension == 1) validate_density(d);
  return d;
}

DensitySpec density_from_table(Support support, std::vector<double> breaks,
                               std::vector<std::vector<double>> coeffs) {
  if (breaks.size() < 2 || coeffs.size() + 1 != breaks.size()) {
    throw std::invalid_argument("density_from_table: need n+1 breakpoints for n segments");
  }
  if (!std::is_sorted(breaks.begin(), breaks.end())) {
    throw std::invalid_argument("density_from_table: breakpoints must be sorted");
  }
  auto raw = [breaks, coeffs](double x) -> double {
    if (x < breaks.front() || x > breaks.back()) return 0.0;
    auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
    std::size_t seg = std::min(coeffs.size() - 1,
                               static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                                   0, it - breaks.begin() - 1)));
    const double t = x - breaks[seg];
    double acc = 0.0;
    for (auto c = coeffs[seg].rbegin(); c != coeffs[seg].rend(); ++c) acc = acc * t + *c;
    return std::max(acc, 0.0);
  };
  // exact segment masses via polynomial antiderivatives
  double mass = 0.0;
  std::vector<double> seg_mass(coeffs.size());
  for (std::size_t s = 0; s < coeffs.size(); ++s) {
    const double w = breaks[s + 1] - breaks[s];
    double acc = 0.0;
    for (std::size_t k = coeffs[s].size(); k-- > 0;) {
      acc = acc * w + coeffs[s][k] / static_cast<double>(k + 1);
    }
    seg_mass[s] = acc * w;
    mass += seg_mass[s];
  }
  if (!(mass > 0.0)) throw std::invalid_argument("density_from_table: non-positive total mass");

  DensitySpec d;
  d.name = "table";
  d.support = support;
  d.pdf = [raw, mass](double x) { return raw(x) / mass; };
  std::vector<double> prefix(coeffs.size() + 1, 0.0);
  for (std::size_t s = 0; s < coeffs.size(); ++s) prefix[s + 1] = prefix[s] + seg_mass[s];
  d.cdf = [breaks, coeffs, prefix, mass](double x) {
    if (x <= breaks.front()) return 0.0;
    if (x >= breaks.back()) return 1.0;
    auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
    const std::size_t seg = static_cast<std::size_t>(it - breaks.begin() - 1);
    const double t = x - breaks[seg];
    double acc = 0.0;
    for (std::size_t k = coeffs[seg].size(); k-- > 0;) {
      acc = acc * t + coeffs[seg][k] / static_cast<double>(k + 1);
    }
    return (prefix[seg] + acc * t) / mass;
  };
  validate_density(d);
  return d;
}

namespace {

double param_or(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

DensitySpec make_builtin_density(const std::string& name,
                                 const std::map<std::string, double>& params) {
  if (name == "normal") return density_normal(param_or(params, "mu", 0.0), param_or(params, "sigma", 1.0));
  if (name == "uniform") return density_uniform01();
  if (name == "exp") return density_exponential(param_or(params, "rate", 1.0));
  if (name == "gamma") return density_gamma(param_or(params, "shape", 2.0), param_or(params, "rate", 1.0));
  if (name == "cauchy") return density_cauchy(param_or(params, "loc", 0.0), param_or(params, "scale", 1.0));
  if (name == "laplace") return density_laplace(param_or(params, "loc", 0.0), param_or(params, "scale", 1.0));
  if (name == "lognormal") return density_lognormal(param_or(params, "mu", 0.0), param_or(params, "sigma", 1.0));
  if (name == "parabolic") return density_parabolic();
  if (name == "pareto") return density_pareto();
  if (name == "normal_mix") {
    return density_normal_mixture2(param_or(params, "p", 0.5),
                                   param_or(params, "mu1", -1.0), param_or(params, "sigma1", 1.0),
                                   param_or(params, "mu2", 1.0), param_or(params, "sigma2", 1.0));
  }
  if (name == "mv_normal") return density_mv_normal(static_cast<int>(param_or(params, "dim", 2)));
  throw std::invalid_argument("unknown density name '" + name + "'");
}

double phi_delta(const DensitySpec& f0, double x, double delta, PhiDeltaVariant variant) {
  if (!(delta > 0.0)) throw std::invalid_argument("phi_delta: delta must be positive");
  double wlo, whi;
  if (variant == PhiDeltaVariant::two_sided) {
    wlo = x - delta;
    whi = x + delta;
  } else if (x < 1.0) {
    wlo = x;
    whi = x + delta;
  } else {
    wlo = x - delta;
    whi = x;
  }
  wlo = std::max(wlo, f0.lo());
  whi = std::min(whi, f0.hi());
  if (!(wlo < whi)) return f0.pdf(std::clamp(x, f0.lo(), f0.hi()));

  constexpr int kGrid = 257;  // 2^8 + 1
  double best = kInf;
  int best_i = 0;
  for (int i = 0; i < kGrid; ++i) {
    const double t = wlo + (whi - wlo) * i / (kGrid - 1);
    const double v = f0.pdf(t);
    if (v < best) { best = v; best_i = i; }
  }
  // golden-section refinement inside the bracketing cells
  double a = wlo + (whi - wlo) * std::max(0, best_i - 1) / (kGrid - 1);
  double b = wlo + (whi - wlo) * std::min(kGrid - 1, best_i + 1) / (kGrid - 1);
  const double gr = 0.6180339887498948482;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f0.pdf(c), fd = f0.pdf(d);
  for (int i = 0; i < 80 && b - a > 1e-14 * (1.0 + std::abs(x)); ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = f0.pdf(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = f0.pdf(d);
    }
  }
  return std::min({best, fc, fd});
}

DensitySpec log_transform(const DensitySpec& f0) {
  if (f0.support != Support::positive_half_line) {
    throw std::invalid_argument("log_transform: requires a density supported on (0, inf)");
  }
  DensitySpec g;
  g.name = "log(" + f0.name + ")";
  g.support = Support::real_line;
  g.log_pdf = [f0](double y) { return y + f0.log_eval(std::exp(y)); };
  g.pdf = [f0](double y) {
    const double x = std::exp(y);
    return x * f0.pdf(x);
  };
  if (f0.cdf) {
    g.cdf = [f0](double y) { return f0.cdf(std::exp(y)); };
  }
  validate_density(g);
  return g;
}

double survival(const DensitySpec& f0, double x) {
  if (x <= f0.lo()) return 1.0;
  if (x >= f0.hi()) return 0.0;
  if (f0.cdf) return std::clamp(1.0 - f0.cdf(x), 0.0, 1.0);
  const QuadResult tail = integrate_support(f0.pdf, x, f0.hi());
  return std::clamp(tail.value, 0.0, 1.0);
}

std::pair<double, double> core_interval(const DensitySpec& f0, double eps) {
  const double lo = f0.lo(), hi = f0.hi();
  if (f0.cdf) {
    double a = std::isinf(lo) ? -1.0 : lo;
    double b = std::isinf(hi) ? 1.0 : hi;
    if (std::isinf(lo)) a = quantile_bisect(f0.cdf, eps, -1e12, b);
    if (std::isinf(hi)) b = quantile_bisect(f0.cdf, 1.0 - eps, a, 1e12);
    return {a, b};
  }
  // no CDF: expand until the density is negligibly small at both ends
  double a = std::isinf(lo) ? -1.0 : lo;
  double b = std::isinf(hi) ? 1.0 : hi;
  if (std::isinf(hi)) {
    while (f0.pdf(b) > eps && b < 1e12) b *= 2.0;
  }
  if (std::isinf(lo)) {
    while (f0.pdf(a) > eps && a > -1e12) a *= 2.0;
  }
  return {a, b};
}

}  // namespace klkit
