#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace klkit {

enum class Support { real_line, unit_interval, positive_half_line };

struct DensitySpec {
  std::string name;
  Support support = Support::real_line;
  int dimension = 1;
  std::function<double(double)> pdf;
  std::function<double(double)> log_pdf;  // optional; falls back to log(pdf)
  std::function<double(std::span<const double>)> pdf_nd;  // dimension >= 2 only
  std::optional<double> upper_bound;      // known sup of pdf, if any
  std::function<double(double)> cdf;      // optional analytic CDF

  double lo() const;
  double hi() const;
  double operator()(double x) const { return pdf(x); }
  double log_eval(double x) const;
  bool has_cdf() const { return static_cast<bool>(cdf); }
};

// Throws std::invalid_argument if the mass check (|integral - 1| <= tol) or the
// upper-bound grid check fails.  Every factory below runs this.
void validate_density(const DensitySpec& spec, double tol = 1e-6);

// ---- built-in catalog (names are the config-addressable identifiers) ----
DensitySpec density_normal(double mu = 0.0, double sigma = 1.0);
DensitySpec density_uniform01();
DensitySpec density_exponential(double rate = 1.0);
DensitySpec density_gamma(double shape, double rate = 1.0);
DensitySpec density_cauchy(double loc = 0.0, double scale = 1.0);
DensitySpec density_laplace(double loc = 0.0, double scale = 1.0);
DensitySpec density_lognormal(double mu = 0.0, double sigma = 1.0);
DensitySpec density_parabolic();       // 6x(1-x) on [0,1]
DensitySpec density_pareto();          // 2(1+x)^-3 on (0, inf)
DensitySpec density_normal_mixture2(double p, double mu1, double sigma1,
                                    double mu2, double sigma2);
DensitySpec density_mv_normal(int dimension);  // product of standard normals

// Piecewise-polynomial table on [breaks[0], breaks.back()]: segment i uses
// coefficients coeffs[i] in local coordinates (x - breaks[i]).  The table is
// normalized to unit mass at construction.
DensitySpec density_from_table(Support support, std::vector<double> breaks,
                               std::vector<std::vector<double>> coeffs);

// Factory used by the config layer: name plus named parameters.
DensitySpec make_builtin_density(const std::string& name,
                                 const std::map<std::string, double>& params);

// ---- window infimum, log-scale transport, survival ----
enum class PhiDeltaVariant { two_sided, one_sided };

// Window infimum of f0 near x: two_sided uses |t - x| <= delta; one_sided uses
// [x, x+delta] for x < 1 and [x-delta, x] for x >= 1.  Windows are clipped to
// the support.  Grid scan (2^8 + 1 points) refined by golden-section search.
double phi_delta(const DensitySpec& f0, double x, double delta,
                 PhiDeltaVariant variant = PhiDeltaVariant::two_sided);

// Transport of a density on (0, inf) through x = e^y: returns
// g0(y) = e^y f0(e^y) on the real line, preserving mass and KL divergences.
DensitySpec log_transform(const DensitySpec& f0);

// 1 - F0(x); analytic CDF when available, tail quadrature otherwise.
double survival(const DensitySpec& f0, double x);

// Smallest interval holding all but ~eps of the mass (quantile bisection when
// a CDF is available, pdf threshold scan otherwise).  Used to seed grids.
std::pair<double, double> core_interval(const DensitySpec& f0, double eps = 1e-10);

}  // namespace klkit
