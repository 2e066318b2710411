#pragma once

// Initial-detection-and-candidate (IDCA) model: Bernoulli(p) lesion
// detection, Poisson(lambda) FP counts on negatives, Poisson(lambda2) FP
// counts on positives, and independent parametric score laws for TP scores
// (theta1), FP scores on negatives (theta2) and FP scores on positives
// (theta3).

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "froc/dataset.hpp"
#include "froc/distributions.hpp"

namespace froc {

struct IdcaParams {
    double p = 0.5;
    double lambda = 1.0;
    double lambda2 = 0.0;
    ScoreDistribution theta1 = ScoreDistribution::normal(0.0, 1.0);
    ScoreDistribution theta2 = ScoreDistribution::normal(0.0, 1.0);
    std::optional<ScoreDistribution> theta3;

    bool operator==(const IdcaParams&) const = default;
};

// Flat parameter vector, in covariance order:
//   lambda, p, lambda2, theta2[0..1], theta1[0..1], theta3[0..1] (if present).
std::vector<std::string> parameter_names(const IdcaParams& params);
Eigen::VectorXd to_vector(const IdcaParams& params);
// nullopt when the vector leaves the parameter space (p outside [0,1],
// negative Poisson means, invalid score-law parameters).
std::optional<IdcaParams> from_vector(const IdcaParams& shape, const Eigen::VectorXd& v);

struct FitCounts {
    long num_positive = 0;        // K1
    long num_negative = 0;        // K2
    long total_lesions = 0;       // T
    long total_detected = 0;      // sum L_is
    long fp_on_negatives = 0;     // sum m_j
    long fp_on_positives = 0;     // sum n_i

    static FitCounts of(const FrocDataset& ds);
};

struct IdcaFit {
    IdcaParams params;
    // Covariance of the estimator itself (already divided by the sample sizes).
    Eigen::MatrixXd covariance;
    std::vector<std::string> parameter_order;
    FitCounts counts;
    double loglik = 0.0;
    FitResult tp_fit;
    FitResult fp_fit;
    std::optional<FitResult> fp_positive_fit;
};

// Log L1 + log L2: lesion detection and TP scores, plus FP counts and scores
// on negative subjects. Throws DataError for a score outside a family support.
double loglikelihood(const IdcaParams& params, const FrocDataset& ds);

// Block-diagonal plug-in covariance:
//   Var(lambda) = lambda / K2,  Var(p) = p (1 - p) / T,  Var(lambda2) = lambda2 / K1,
//   Cov(theta2) = I_f(theta2)^-1 / sum m,  Cov(theta1) = I_g(theta1)^-1 / sum L,
//   Cov(theta3) = I_f(theta3)^-1 / sum n.
// The lambda2 and theta3 blocks mirror the negative-subject blocks by
// analogy; they carry no separate asymptotic derivation.
Eigen::MatrixXd asymptotic_covariance(const IdcaParams& params, const FitCounts& counts);

// Maximum-likelihood fit. Throws DataError when a component has too few
// scores, NumericalError on p = 0 or 1 or a non-converged score fit.
IdcaFit fit(const FrocDataset& ds, Family tp_family, Family fp_family);

}  // namespace froc
