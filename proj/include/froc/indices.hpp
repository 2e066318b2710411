#pragma once

// AFROC accuracy indices under the IDCA model and their delta-method
// inference.

#include <Eigen/Core>

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "froc/idca.hpp"

namespace froc {

inline constexpr int kAucQuadratureNodes = 201;
// AUC evaluation fails when doubling the node count moves the result more than this.
inline constexpr double kAucQuadratureTolerance = 1e-6;
// Minimal distance of a band grid point from 0 and from the maximal FPF.
inline constexpr double kBandEdgeEpsilon = 1e-6;
inline constexpr int kEllipseBoundaryPoints = 360;

// FPF(zeta) = 1 - exp(-lambda (1 - F_theta2(zeta))).
double fpf_at(const IdcaParams& params, double zeta);
// LLF(zeta) = p (1 - G_theta1(zeta)).
double llf_at(const IdcaParams& params, double zeta);
// Largest attainable FPF, P(m_j > 0) = 1 - exp(-lambda).
double max_fpf(const IdcaParams& params);

// Area under the AFROC curve including the straight closing segment:
//   p e^-lambda (E[e^{lambda F_theta2(Y*)}] - 1) + (1 + p) e^-lambda / 2,  Y* ~ G_theta1.
// The expectation is integrated over u = G_theta1(y) with a 201-point
// Gauss-Legendre rule and checked against the 402-point rule.
double afroc_auc(const IdcaParams& params);
// The expectation E[e^{lambda F_theta2(Y*)}] with an explicit node count.
double auc_expectation(const IdcaParams& params, int nodes);

// LLF at fixed FPF q: p (1 - G_theta1(F_theta2^-1(1 + log(1 - q) / lambda))).
// Throws NumericalError when q is outside [0, 1 - e^-lambda].
double llf_at_fpf(const IdcaParams& params, double q);

struct CurvePoint {
    double fpf = 0.0;
    double llf = 0.0;
    std::optional<double> band_low;
    std::optional<double> band_high;
    std::optional<std::string> error;
};

// npoints points on a uniform FPF grid over [0, 1 - e^-lambda].
std::vector<CurvePoint> afroc_curve(const IdcaParams& params, int npoints);

// Scalar index of the model parameters.
struct IndexFunction {
    std::string name;
    std::function<double(const IdcaParams&)> eval;
};

IndexFunction auc_index();
IndexFunction llf_index(double q);
// Projection onto one coordinate of the parameter vector ("p", "lambda",
// "lambda2", "theta1.mu", ...).
IndexFunction parameter_index(const std::string& name);
// "auc", "llf@<q>" or any parameter name.
IndexFunction parse_index(std::string_view spec);

// Central differences over the parameter vector, step max(1e-5, 1e-5 |x|).
// Falls back to a one-sided difference where a side leaves the parameter
// space (e.g. lambda2 = 0).
Eigen::VectorXd index_gradient(const IndexFunction& f, const IdcaParams& params);

struct IndexEstimate {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double alpha = 0.05;
};

double normal_quantile(double u);
double chi_square_quantile(double u, int df);

// value +- z_{1-alpha/2} sqrt(grad' Sigma grad) with the estimator-unit covariance.
IndexEstimate ci_index(const IdcaFit& fit, const IndexFunction& f, double alpha);

// Pointwise LLF band over q_grid. Grid points beyond 1 - e^-lambda - eps are
// dropped. With use_logit the interval is built for logit(LLF) and mapped
// back; points where the logit is undefined carry an error marker.
std::vector<CurvePoint> ci_llf_pointwise(const IdcaFit& fit, std::span<const double> q_grid, double alpha,
                                         bool use_logit);

enum class DfMode { M, MMinus1 };

struct EllipseSpec {
    std::vector<std::string> names;
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;   // J Sigma J'
    double threshold = 0.0;  // chi-square quantile
    int df = 0;
    double alpha = 0.05;
    std::vector<std::array<double, 2>> boundary;  // only for two indices

    bool contains(const Eigen::VectorXd& h) const;
};

EllipseSpec confidence_ellipse(const IdcaFit& fit, std::span<const IndexFunction> indices, double alpha,
                               DfMode df_mode = DfMode::M);

}  // namespace froc
