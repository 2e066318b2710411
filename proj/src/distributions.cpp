#include "froc/distributions.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "froc/errors.hpp"

namespace froc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_beta_fn(double a, double b) {
    return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

void require_beta_support(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("beta score " + std::to_string(x) + " outside [0, 1]");
}

double beta_loglik(double a, double b, double sum_log_x, double sum_log_1mx, std::size_t n) {
    return (a - 1.0) * sum_log_x + (b - 1.0) * sum_log_1mx - static_cast<double>(n) * log_beta_fn(a, b);
}

FitResult fit_normal(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sigma = std::sqrt(ss / n);
    if (!(sigma > 0.0)) throw NumericalError("normal fit: all samples identical, sigma = 0");

    FitResult r;
    r.family = Family::Normal;
    r.params = {mean, sigma};
    r.n = x.size();
    r.converged = true;
    r.loglik = -0.5 * n * (std::log(2.0 * std::numbers::pi * sigma * sigma) + 1.0);
    return r;
}

FitResult fit_beta(std::span<const double> x) {
    const std::size_t n = x.size();
    const double nd = static_cast<double>(n);
    double s1 = 0.0, s2 = 0.0, mean = 0.0;
    for (double v : x) {
        if (!(v > 0.0 && v < 1.0))
            throw std::domain_error("beta fit needs samples strictly inside (0, 1); got " + std::to_string(v) +
                                    " (shrink boundary samples first)");
        s1 += std::log(v);
        s2 += std::log1p(-v);
        mean += v;
    }
    mean /= nd;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= nd;

    // Method of moments start.
    double c = (var > 0.0) ? mean * (1.0 - mean) / var - 1.0 : 1.0;
    if (!(c > 0.0)) c = 1.0;
    double a = mean * c;
    double b = (1.0 - mean) * c;

    auto gradient = [&](double aa, double bb) {
        const double dab = boost::math::digamma(aa + bb);
        return Eigen::Vector2d(nd * (dab - boost::math::digamma(aa)) + s1, nd * (dab - boost::math::digamma(bb)) + s2);
    };

    FitResult r;
    r.family = Family::Beta;
    r.n = n;
    Eigen::Vector2d g = gradient(a, b);
    double ll = beta_loglik(a, b, s1, s2, n);
    int it = 0;
    while (g.norm() > kBetaGradientTolerance && it < kBetaMaxIterations) {
        ++it;
        const Eigen::Matrix2d info = ScoreDistribution::beta(a, b).fisher_information() * nd;
        Eigen::Vector2d step = info.inverse() * g;
        // Halve until the step stays in the positive orthant and does not lower the likelihood.
        double scale = 1.0;
        double na = a + step[0], nb = b + step[1];
        for (int h = 0; h < 60; ++h) {
            na = a + scale * step[0];
            nb = b + scale * step[1];
            if (na > 0.0 && nb > 0.0 && beta_loglik(na, nb, s1, s2, n) >= ll - 1e-12 * std::abs(ll)) break;
            scale *= 0.5;
        }
        if (!(na > 0.0 && nb > 0.0)) break;
        a = na;
        b = nb;
        ll = beta_loglik(a, b, s1, s2, n);
        g = gradient(a, b);
    }
    r.params = {a, b};
    r.loglik = ll;
    r.iterations = it;
    r.gradient_norm = g.norm();
    r.converged = r.gradient_norm <= kBetaGradientTolerance;
    return r;
}

}  // namespace

std::string_view family_name(Family f) { return f == Family::Normal ? "normal" : "beta"; }

Family parse_family(std::string_view name) {
    if (name == "normal") return Family::Normal;
    if (name == "beta") return Family::Beta;
    throw std::invalid_argument("unknown distribution family '" + std::string(name) + "' (expected normal or beta)");
}

bool ScoreDistribution::valid_params(Family family, const Params& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) return false;
    if (family == Family::Normal) return p[1] > 0.0;
    return p[0] > 0.0 && p[1] > 0.0;
}

ScoreDistribution ScoreDistribution::make(Family family, const Params& p) {
    if (!valid_params(family, p))
        throw std::invalid_argument(std::string(family_name(family)) + " parameters (" + std::to_string(p[0]) + ", " +
                                    std::to_string(p[1]) + ") out of range");
    return ScoreDistribution(family, p);
}

ScoreDistribution ScoreDistribution::normal(double mu, double sigma) { return make(Family::Normal, {mu, sigma}); }
ScoreDistribution ScoreDistribution::beta(double alpha, double beta) { return make(Family::Beta, {alpha, beta}); }

std::array<std::string_view, 2> ScoreDistribution::param_names() const {
    if (family_ == Family::Normal) return {"mu", "sigma"};
    return {"alpha", "beta"};
}

double ScoreDistribution::support_lower() const { return family_ == Family::Normal ? -kInf : 0.0; }
double ScoreDistribution::support_upper() const { return family_ == Family::Normal ? kInf : 1.0; }

double ScoreDistribution::pdf(double x) const {
    if (family_ == Family::Normal) {
        const double z = (x - params_[0]) / params_[1];
        return std::exp(-0.5 * z * z) / (params_[1] * std::sqrt(2.0 * std::numbers::pi));
    }
    require_beta_support(x);
    return boost::math::ibeta_derivative(params_[0], params_[1], x);
}

double ScoreDistribution::log_pdf(double x) const {
    if (family_ == Family::Normal) {
        const double z = (x - params_[0]) / params_[1];
        return -0.5 * z * z - std::log(params_[1]) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    require_beta_support(x);
    const double a = params_[0], b = params_[1];
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b);
}

double ScoreDistribution::cdf(double x) const {
    if (std::isnan(x)) throw std::domain_error("cdf of NaN");
    if (family_ == Family::Normal) {
        if (x == kInf) return 1.0;
        if (x == -kInf) return 0.0;
        return 0.5 * std::erfc(-(x - params_[0]) / (params_[1] * std::numbers::sqrt2));
    }
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(params_[0], params_[1], x);
}

double ScoreDistribution::quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("quantile level " + std::to_string(u) + " outside [0, 1]");
    if (u == 0.0) return support_lower();
    if (u == 1.0) return support_upper();
    if (family_ == Family::Normal)
        return params_[0] - params_[1] * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
    return boost::math::ibeta_inv(params_[0], params_[1], u);
}

Eigen::Matrix2d ScoreDistribution::fisher_information() const {
    Eigen::Matrix2d info;
    if (family_ == Family::Normal) {
        const double s2 = params_[1] * params_[1];
        info << 1.0 / s2, 0.0, 0.0, 2.0 / s2;
    } else {
        const double tab = boost::math::trigamma(params_[0] + params_[1]);
        info << boost::math::trigamma(params_[0]) - tab, -tab, -tab, boost::math::trigamma(params_[1]) - tab;
    }
    return info;
}

FitResult fit_mle(Family family, std::span<const double> samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("fit_mle needs at least 2 samples, got " + std::to_string(samples.size()));
    for (double v : samples)
        if (!std::isfinite(v)) throw std::invalid_argument("fit_mle: non-finite sample");
    return family == Family::Normal ? fit_normal(samples) : fit_beta(samples);
}

std::vector<double> shrink_to_open_unit(std::span<const double> samples) {
    const double n = static_cast<double>(samples.size());
    std::vector<double> out(samples.begin(), samples.end());
    for (double& x : out) x = (x * (n - 1.0) + 0.5) / n;
    return out;
}

double kolmogorov_survival(double x) {
    if (!(x > 0.0)) return 1.0;
    if (x < 1.18) {
        // Theta-function form converges fast for small x.
        const double t = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
        double s = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double term = std::exp(-(2.0 * k - 1.0) * (2.0 * k - 1.0) * t);
            s += term;
            if (term < 1e-17 * s) break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1) ? term : -term;
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_test(const ScoreDistribution& d, std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("ks_test needs a nonempty sample");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = d.cdf(x[i]);
        stat = std::max({stat, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return {stat, kolmogorov_survival(std::sqrt(n) * stat)};
}

}  // namespace froc
