#include "klkit/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace klkit {

MixingDistribution MixingDistribution::discrete(std::vector<MixingAtom> atoms) {
    MixingDistribution m;
    m.kind_ = Kind::discrete;
    m.atoms_ = std::move(atoms);
    return m;
}

MixingDistribution MixingDistribution::density(MixingDensity d) {
    if (!d.pdf || !d.theta_of)
        throw std::invalid_argument("MixingDensity needs pdf and theta_of");
    if (!(d.lo < d.hi))
        throw std::invalid_argument("MixingDensity needs lo < hi");
    MixingDistribution m;
    m.kind_ = Kind::density;
    m.density_ = std::move(d);
    return m;
}

double MixingDistribution::total_weight() const {
    if (kind_ == Kind::density) return density_.weight;
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
}

MixtureDensity::MixtureDensity(KernelSpec kernel, MixingDistribution mixing,
                               std::vector<double> phi)
    : kernel_(kernel), mixing_(std::move(mixing)), phi_(std::move(phi)) {
    const std::size_t ta = theta_arity(kernel_);
    const std::size_t pa = phi_arity(kernel_);
    if (!phi_.empty() && phi_.size() != pa)
        throw std::invalid_argument("phi size does not match kernel family");
    if (mixing_.kind() == MixingDistribution::Kind::discrete) {
        // Atoms carry either theta alone (shared phi) or theta|phi.
        const std::size_t want = phi_.empty() ? ta + pa : ta;
        for (const auto& a : mixing_.atoms()) {
            if (a.theta.size() != want)
                throw std::invalid_argument("mixing atom has wrong arity");
            if (!(a.weight >= 0.0))
                throw std::invalid_argument("mixing atom weight must be >= 0");
        }
    }
}

double MixtureDensity::eval_discrete(std::span<const double> x) const {
    const std::size_t ta = theta_arity(kernel_);
    double s = 0.0;
    for (const auto& a : mixing_.atoms()) {
        if (a.weight == 0.0) continue;
        std::span<const double> th(a.theta.data(), ta);
        std::span<const double> ph =
            phi_.empty() ? std::span<const double>(a.theta.data() + ta,
                                                   a.theta.size() - ta)
                         : std::span<const double>(phi_);
        s += a.weight * kernel_eval(kernel_, x, th, ph);
    }
    return s;
}

double MixtureDensity::log_eval_discrete(std::span<const double> x) const {
    const std::size_t ta = theta_arity(kernel_);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(mixing_.atoms().size());
    for (const auto& a : mixing_.atoms()) {
        if (a.weight == 0.0) continue;
        std::span<const double> th(a.theta.data(), ta);
        std::span<const double> ph =
            phi_.empty() ? std::span<const double>(a.theta.data() + ta,
                                                   a.theta.size() - ta)
                         : std::span<const double>(phi_);
        const double t = std::log(a.weight) + kernel_log_eval(kernel_, x, th, ph);
        terms.push_back(t);
        best = std::max(best, t);
    }
    if (terms.empty() || !std::isfinite(best)) return best;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - best);
    return best + std::log(s);
}

double MixtureDensity::eval_density(double x) const {
    const MixingDensity& d = mixing_.density_part();
    auto integrand = [&](double v) {
        const double p = d.pdf(v);
        if (p <= 0.0) return 0.0;
        const std::vector<double> par = d.theta_of(v);
        const std::size_t ta = theta_arity(kernel_);
        std::span<const double> th(par.data(), ta);
        std::span<const double> ph =
            phi_.empty()
                ? std::span<const double>(par.data() + ta, par.size() - ta)
                : std::span<const double>(phi_);
        return p * kernel_eval(kernel_, std::span<const double>(&x, 1), th, ph);
    };
    std::vector<double> hints;
    if (quad_hints) {
        for (double h : quad_hints(x))
            if (h > d.lo && h < d.hi) hints.push_back(h);
        std::sort(hints.begin(), hints.end());
    }
    QuadResult r = integrate(Fn1(integrand), d.lo, d.hi, quad_options, hints);
    if (!r.converged)
        throw QuadratureError("mixture quadrature did not converge", r.error);
    return std::max(0.0, r.value) * d.weight;
}

double MixtureDensity::operator()(std::span<const double> x) const {
    if (fast_eval) {
        if (x.size() != 1)
            throw std::invalid_argument("fast_eval is univariate");
        return fast_eval(x[0]);
    }
    if (mixing_.kind() == MixingDistribution::Kind::discrete)
        return eval_discrete(x);
    if (x.size() != 1)
        throw std::invalid_argument("continuous mixing is univariate");
    return eval_density(x[0]);
}

double MixtureDensity::operator()(double x) const {
    return (*this)(std::span<const double>(&x, 1));
}

double MixtureDensity::log_eval(std::span<const double> x) const {
    if (mixing_.kind() == MixingDistribution::Kind::discrete && !fast_eval)
        return log_eval_discrete(x);
    const double v = (*this)(x);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

double MixtureDensity::log_eval(double x) const {
    return log_eval(std::span<const double>(&x, 1));
}

}  // namespace klkit
