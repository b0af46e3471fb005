#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace klkit {

struct QuadOptions {
  double abs_tol = 1e-8;
  double rel_tol = 0.0;   // stop when error <= abs_tol + rel_tol * |value|
  int max_depth = 40;     // per-panel bisection depth cap
  int max_panels = 20000;
  bool collect_leaves = false;  // export the final panel partition
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;          // estimated absolute error bound
  long evaluations = 0;
  bool converged = false;
  int flagged_panels = 0;      // leaf panels containing at least one flagged node
  int nonfinite_nodes = 0;     // nodes whose value was non-finite (treated as 0)
  // Leaf partition (collect_leaves only): leaf i spans
  // [leaf_edges[i], leaf_edges[i+1]] and contributed leaf_values[i].
  // Edges are in the variable integrate() ran over (t-space for the
  // mapped unbounded-domain entry points).
  std::vector<double> leaf_edges;
  std::vector<double> leaf_values;
};

struct QuadratureError : std::runtime_error {
  double residual;
  QuadratureError(const std::string& what, double res)
      : std::runtime_error(what), residual(res) {}
};

// Integrand: value at x; may set *flag to mark the enclosing panel (the flag
// pointer is never null).  Used by the KL engine for singularity bookkeeping.
using FlaggedFn = std::function<double(double, bool*)>;
using Fn1 = std::function<double(double)>;

// Adaptive Gauss-Kronrod 7/15 on [a, b].  `hints` are interior abscissae used
// to seed the initial partition (out-of-range entries are ignored).
QuadResult integrate(const FlaggedFn& f, double a, double b,
                     const QuadOptions& opt = {}, std::span<const double> hints = {});
QuadResult integrate(const Fn1& f, double a, double b,
                     const QuadOptions& opt = {}, std::span<const double> hints = {});

// Unbounded domains via the rational map x = t / (1 - t^2). `hints` in x-space.
QuadResult integrate_half_line(const FlaggedFn& f, double a = 0.0,
                               const QuadOptions& opt = {}, std::span<const double> hints = {});
QuadResult integrate_half_line(const Fn1& f, double a = 0.0,
                               const QuadOptions& opt = {}, std::span<const double> hints = {});
QuadResult integrate_real_line(const FlaggedFn& f,
                               const QuadOptions& opt = {}, std::span<const double> hints = {});
QuadResult integrate_real_line(const Fn1& f,
                               const QuadOptions& opt = {}, std::span<const double> hints = {});

// Dispatch on (lo, hi) which may be +-infinity.
QuadResult integrate_support(const FlaggedFn& f, double lo, double hi,
                             const QuadOptions& opt = {}, std::span<const double> hints = {});
QuadResult integrate_support(const Fn1& f, double lo, double hi,
                             const QuadOptions& opt = {}, std::span<const double> hints = {});

double rational_map(double t);           // t in (-1, 1) -> x
double rational_map_jacobian(double t);  // dx/dt
double inverse_rational_map(double x);   // x -> t

}  // namespace klkit
