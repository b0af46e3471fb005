#include "klkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace klkit {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK values).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
  double a = 0, b = 0;
  double value = 0, error = 0;
  int depth = 0;
  bool flagged = false;
};

struct PanelWorse {
  bool operator()(const Panel& lhs, const Panel& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error;
    return lhs.a > rhs.a;  // deterministic tie-break
  }
};

Panel evaluate_panel(const FlaggedFn& f, double a, double b, int depth,
                     long* evaluations, int* nonfinite) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  bool flagged = false;
  for (int i = 0; i < 8; ++i) {
    bool flag = false;
    double v = f(c + h * kXgk[i], &flag);
    if (!std::isfinite(v)) { v = 0.0; ++*nonfinite; }
    flagged |= flag;
    fv[i] = v;
    ++*evaluations;
    if (i == 7) break;
    flag = false;
    v = f(c - h * kXgk[i], &flag);
    if (!std::isfinite(v)) { v = 0.0; ++*nonfinite; }
    flagged |= flag;
    fv[14 - i] = v;
    ++*evaluations;
  }
  double resk = 0.0;
  for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
  resk += kWgk[7] * fv[7];
  double resg = 0.0;
  for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  resg += kWg[3] * fv[7];

  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int i = 0; i < 7; ++i) {
    resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
  }
  resasc *= std::abs(h);

  double err = std::abs(resk - resg) * std::abs(h);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  Panel p;
  p.a = a; p.b = b; p.depth = depth;
  p.value = resk * h;
  p.error = err;
  p.flagged = flagged;
  return p;
}

double tree_sum(std::vector<double>& v) {
  // pairwise reduction for a summation order independent of refinement history
  if (v.empty()) return 0.0;
  while (v.size() > 1) {
    std::size_t half = (v.size() + 1) / 2;
    for (std::size_t i = 0; i + half < v.size(); ++i) v[i] += v[i + half];
    v.resize(half);
  }
  return v[0];
}

}  // namespace

QuadResult integrate(const FlaggedFn& f, double a, double b,
                     const QuadOptions& opt, std::span<const double> hints) {
  QuadResult res;
  if (!(a < b)) { res.converged = true; return res; }

  std::vector<double> cuts{a, b};
  for (double h : hints) {
    if (h > a && h < b) cuts.push_back(h);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel, std::vector<Panel>, PanelWorse> queue;
  std::vector<Panel> settled;  // panels at depth cap, no longer splittable
  double total_value = 0.0, total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = evaluate_panel(f, cuts[i], cuts[i + 1], 0, &res.evaluations, &res.nonfinite_nodes);
    total_value += p.value;
    total_error += p.error;
    queue.push(p);
  }

  int panels = static_cast<int>(queue.size());
  while (!queue.empty()) {
    const double target = opt.abs_tol + opt.rel_tol * std::abs(total_value);
    if (total_error <= target) break;
    if (panels >= opt.max_panels) break;
    Panel worst = queue.top();
    queue.pop();
    if (worst.depth >= opt.max_depth || worst.b - worst.a <= 1e-15 * (std::abs(worst.a) + 1.0)) {
      settled.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = evaluate_panel(f, worst.a, mid, worst.depth + 1, &res.evaluations, &res.nonfinite_nodes);
    Panel right = evaluate_panel(f, mid, worst.b, worst.depth + 1, &res.evaluations, &res.nonfinite_nodes);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }

  std::vector<Panel> leaves = std::move(settled);
  while (!queue.empty()) { leaves.push_back(queue.top()); queue.pop(); }
  std::sort(leaves.begin(), leaves.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });

  std::vector<double> values, errors;
  values.reserve(leaves.size());
  errors.reserve(leaves.size());
  for (const Panel& p : leaves) {
    values.push_back(p.value);
    errors.push_back(p.error);
    if (p.flagged) ++res.flagged_panels;
  }
  if (opt.collect_leaves && !leaves.empty()) {
    res.leaf_values = values;
    res.leaf_edges.reserve(leaves.size() + 1);
    res.leaf_edges.push_back(leaves.front().a);
    for (const Panel& p : leaves) res.leaf_edges.push_back(p.b);
  }
  res.value = tree_sum(values);
  res.error = tree_sum(errors);
  res.converged = res.error <= opt.abs_tol + opt.rel_tol * std::abs(res.value);
  return res;
}

QuadResult integrate(const Fn1& f, double a, double b,
                     const QuadOptions& opt, std::span<const double> hints) {
  return integrate([&f](double x, bool*) { return f(x); }, a, b, opt, hints);
}

double rational_map(double t) { return t / (1.0 - t * t); }

double rational_map_jacobian(double t) {
  const double d = 1.0 - t * t;
  return (1.0 + t * t) / (d * d);
}

double inverse_rational_map(double x) {
  if (x == 0.0) return 0.0;
  const double ax = std::abs(x);
  // positive root of a*t^2 + t - a = 0 with a = |x|
  const double t = (-1.0 + std::sqrt(1.0 + 4.0 * ax * ax)) / (2.0 * ax);
  return x > 0 ? t : -t;
}

namespace {

QuadResult integrate_mapped(const FlaggedFn& f, double t_lo, double t_hi, double shift,
                            const QuadOptions& opt, std::span<const double> hints) {
  std::vector<double> t_hints;
  t_hints.reserve(hints.size());
  for (double h : hints) t_hints.push_back(inverse_rational_map(h - shift));
  auto mapped = [&f, shift](double t, bool* flag) {
    const double x = shift + rational_map(t);
    return f(x, flag) * rational_map_jacobian(t);
  };
  // the map has jacobian ~1 at t=0 and blows up near |t|=1; stay strictly inside
  const double eps = 1e-14;
  return integrate(FlaggedFn(mapped), std::max(t_lo, -1.0 + eps), std::min(t_hi, 1.0 - eps),
                   opt, t_hints);
}

}  // namespace

QuadResult integrate_half_line(const FlaggedFn& f, double a,
                               const QuadOptions& opt, std::span<const double> hints) {
  return integrate_mapped(f, 0.0, 1.0, a, opt, hints);
}

QuadResult integrate_half_line(const Fn1& f, double a,
                               const QuadOptions& opt, std::span<const double> hints) {
  return integrate_half_line([&f](double x, bool*) { return f(x); }, a, opt, hints);
}

QuadResult integrate_real_line(const FlaggedFn& f,
                               const QuadOptions& opt, std::span<const double> hints) {
  return integrate_mapped(f, -1.0, 1.0, 0.0, opt, hints);
}

QuadResult integrate_real_line(const Fn1& f,
                               const QuadOptions& opt, std::span<const double> hints) {
  return integrate_real_line([&f](double x, bool*) { return f(x); }, opt, hints);
}

QuadResult integrate_support(const FlaggedFn& f, double lo, double hi,
                             const QuadOptions& opt, std::span<const double> hints) {
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  if (lo_inf && hi_inf) return integrate_real_line(f, opt, hints);
  if (hi_inf) return integrate_half_line(f, lo, opt, hints);
  if (lo_inf) {
    auto reflected = [&f](double x, bool* flag) { return f(-x, flag); };
    std::vector<double> rh(hints.begin(), hints.end());
    for (double& h : rh) h = -h;
    return integrate_half_line(FlaggedFn(reflected), -hi, opt, rh);
  }
  return integrate(f, lo, hi, opt, hints);
}

QuadResult integrate_support(const Fn1& f, double lo, double hi,
                             const QuadOptions& opt, std::span<const double> hints) {
  return integrate_support([&f](double x, bool*) { return f(x); }, lo, hi, opt, hints);
}

}  // namespace klkit
