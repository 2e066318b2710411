#pragma once

// Parametric confidence-score families used for TP and FP scores.

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace froc {

enum class Family { Normal, Beta };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);  // "normal" | "beta"

// Normal(mu, sigma) or Beta(alpha, beta). Immutable; construction validates.
class ScoreDistribution {
public:
    using Params = std::array<double, 2>;

    static ScoreDistribution normal(double mu, double sigma);
    static ScoreDistribution beta(double alpha, double beta);
    static ScoreDistribution make(Family family, const Params& params);
    static bool valid_params(Family family, const Params& params);

    Family family() const { return family_; }
    const Params& params() const { return params_; }
    // Parameter labels, e.g. {"mu", "sigma"}.
    std::array<std::string_view, 2> param_names() const;

    double support_lower() const;
    double support_upper() const;

    double pdf(double x) const;
    double log_pdf(double x) const;
    // Clamped to 0/1 outside the support.
    double cdf(double x) const;
    // u = 0 and u = 1 map to the support infimum / supremum.
    double quantile(double u) const;

    // Per-observation Fisher information in (param0, param1) coordinates.
    Eigen::Matrix2d fisher_information() const;

    bool operator==(const ScoreDistribution&) const = default;

private:
    ScoreDistribution(Family f, const Params& p) : family_(f), params_(p) {}

    Family family_;
    Params params_;
};

struct FitResult {
    Family family = Family::Normal;
    ScoreDistribution::Params params{};
    double loglik = 0.0;
    std::size_t n = 0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;

    ScoreDistribution distribution() const { return ScoreDistribution::make(family, params); }
};

// Beta Newton iteration limits.
inline constexpr double kBetaGradientTolerance = 1e-9;
inline constexpr int kBetaMaxIterations = 200;

// Normal: closed form (divide-by-n sigma). Beta: Newton on the digamma score
// equations from a method-of-moments start; converged=false if the gradient
// norm does not fall below kBetaGradientTolerance within the cap.
FitResult fit_mle(Family family, std::span<const double> samples);

// Pulls samples off the closed interval ends: x <- (x (n-1) + 0.5) / n.
std::vector<double> shrink_to_open_unit(std::span<const double> samples);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov test with the asymptotic p-value
// P(K > sqrt(n) D). No correction for estimated parameters.
KsResult ks_test(const ScoreDistribution& d, std::span<const double> samples);

// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_survival(double x);

}  // namespace froc
