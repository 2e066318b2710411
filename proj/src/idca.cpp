#include "froc/idca.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

#include "froc/errors.hpp"

namespace froc {

namespace {

FitResult fit_component(Family family, const std::vector<double>& scores, const char* what) {
    FitResult r;
    try {
        r = fit_mle(family, scores);
    } catch (const std::domain_error& e) {
        throw DataError(std::string(what) + ": " + e.what());
    }
    if (!r.converged)
        throw NumericalError(std::string(what) + ": " + std::string(family_name(family)) +
                             " fit did not converge (gradient norm " + std::to_string(r.gradient_norm) + ")");
    return r;
}

Eigen::Matrix2d inverse_information(const ScoreDistribution& d, const char* what) {
    Eigen::LLT<Eigen::Matrix2d> llt(d.fisher_information());
    if (llt.info() != Eigen::Success) throw NumericalError(std::string("singular information matrix for ") + what);
    return llt.solve(Eigen::Matrix2d::Identity());
}

}  // namespace

FitCounts FitCounts::of(const FrocDataset& ds) {
    FitCounts c;
    c.num_positive = static_cast<long>(ds.num_positive());
    c.num_negative = static_cast<long>(ds.num_negative());
    c.total_lesions = ds.total_lesions();
    c.total_detected = ds.total_detected();
    c.fp_on_negatives = ds.total_fp_on_negatives();
    c.fp_on_positives = ds.total_fp_on_positives();
    return c;
}

std::vector<std::string> parameter_names(const IdcaParams& params) {
    std::vector<std::string> names{"lambda", "p", "lambda2"};
    auto add = [&](const char* prefix, const ScoreDistribution& d) {
        for (auto n : d.param_names()) names.push_back(std::string(prefix) + "." + std::string(n));
    };
    add("theta2", params.theta2);
    add("theta1", params.theta1);
    if (params.theta3) add("theta3", *params.theta3);
    return names;
}

Eigen::VectorXd to_vector(const IdcaParams& params) {
    Eigen::VectorXd v(params.theta3 ? 9 : 7);
    v << params.lambda, params.p, params.lambda2, params.theta2.params()[0], params.theta2.params()[1],
        params.theta1.params()[0], params.theta1.params()[1];
    if (params.theta3) {
        v[7] = params.theta3->params()[0];
        v[8] = params.theta3->params()[1];
    }
    return v;
}

std::optional<IdcaParams> from_vector(const IdcaParams& shape, const Eigen::VectorXd& v) {
    const Eigen::Index expected = shape.theta3 ? 9 : 7;
    if (v.size() != expected) throw std::invalid_argument("parameter vector has wrong length");
    if (!(v[0] >= 0.0) || !(v[1] >= 0.0 && v[1] <= 1.0) || !(v[2] >= 0.0)) return std::nullopt;
    const ScoreDistribution::Params t2{v[3], v[4]}, t1{v[5], v[6]};
    if (!ScoreDistribution::valid_params(shape.theta2.family(), t2)) return std::nullopt;
    if (!ScoreDistribution::valid_params(shape.theta1.family(), t1)) return std::nullopt;
    IdcaParams out = shape;
    out.lambda = v[0];
    out.p = v[1];
    out.lambda2 = v[2];
    out.theta2 = ScoreDistribution::make(shape.theta2.family(), t2);
    out.theta1 = ScoreDistribution::make(shape.theta1.family(), t1);
    if (shape.theta3) {
        const ScoreDistribution::Params t3{v[7], v[8]};
        if (!ScoreDistribution::valid_params(shape.theta3->family(), t3)) return std::nullopt;
        out.theta3 = ScoreDistribution::make(shape.theta3->family(), t3);
    }
    return out;
}

double loglikelihood(const IdcaParams& params, const FrocDataset& ds) {
    auto log_density = [](const ScoreDistribution& d, double x) {
        if (x < d.support_lower() || x > d.support_upper())
            throw DataError("score " + std::to_string(x) + " outside the " + std::string(family_name(d.family())) +
                            " support");
        return d.log_pdf(x);
    };
    const double log_p = std::log(params.p);
    const double log_q = std::log1p(-params.p);
    double ll = 0.0;
    for (const auto& s : ds.positives) {
        const int hit = s.detected_count();
        const int miss = s.lesion_count - hit;
        if (hit > 0) ll += hit * log_p;
        if (miss > 0) ll += miss * log_q;
        for (double y : s.tp_scores) ll += log_density(params.theta1, y);
    }
    const double log_lambda = std::log(params.lambda);
    for (const auto& s : ds.negatives) {
        const double m = static_cast<double>(s.fp_scores.size());
        ll += -params.lambda - boost::math::lgamma(m + 1.0);
        if (m > 0) ll += m * log_lambda;
        for (double x : s.fp_scores) ll += log_density(params.theta2, x);
    }
    return ll;
}

Eigen::MatrixXd asymptotic_covariance(const IdcaParams& params, const FitCounts& c) {
    if (c.num_negative < 1 || c.total_lesions < 1 || c.num_positive < 1)
        throw NumericalError("covariance needs K1 >= 1, K2 >= 1 and T >= 1");
    if (c.total_detected < 1 || c.fp_on_negatives < 1)
        throw NumericalError("covariance needs at least one TP score and one FP score on negatives");
    const Eigen::Index dim = params.theta3 ? 9 : 7;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    cov(0, 0) = params.lambda / static_cast<double>(c.num_negative);
    cov(1, 1) = params.p * (1.0 - params.p) / static_cast<double>(c.total_lesions);
    cov(2, 2) = params.lambda2 / static_cast<double>(c.num_positive);
    cov.block<2, 2>(3, 3) = inverse_information(params.theta2, "theta2") / static_cast<double>(c.fp_on_negatives);
    cov.block<2, 2>(5, 5) = inverse_information(params.theta1, "theta1") / static_cast<double>(c.total_detected);
    if (params.theta3) {
        if (c.fp_on_positives < 1) throw NumericalError("theta3 present without FP scores on positives");
        cov.block<2, 2>(7, 7) = inverse_information(*params.theta3, "theta3") / static_cast<double>(c.fp_on_positives);
    }
    return cov;
}

IdcaFit fit(const FrocDataset& ds, Family tp_family, Family fp_family) {
    const ValidationReport report = validate(ds);
    if (!report.ok()) {
        std::string msg = "dataset not fit-ready:";
        for (const auto& issue : report.issues) msg += " " + issue + ";";
        throw DataError(msg);
    }
    IdcaFit out;
    out.counts = FitCounts::of(ds);
    const auto& c = out.counts;
    IdcaParams& params = out.params;
    params.p = static_cast<double>(c.total_detected) / static_cast<double>(c.total_lesions);
    if (c.total_detected == 0 || c.total_detected == c.total_lesions)
        throw NumericalError("boundary estimate; CI theory inapplicable (p = " + std::to_string(params.p) + ")");
    params.lambda = static_cast<double>(c.fp_on_negatives) / static_cast<double>(c.num_negative);
    params.lambda2 = static_cast<double>(c.fp_on_positives) / static_cast<double>(c.num_positive);

    out.tp_fit = fit_component(tp_family, ds.all_tp_scores(), "theta1 (TP scores)");
    out.fp_fit = fit_component(fp_family, ds.fp_scores_on_negatives(), "theta2 (FP scores on negatives)");
    params.theta1 = out.tp_fit.distribution();
    params.theta2 = out.fp_fit.distribution();
    if (c.fp_on_positives >= 2) {
        out.fp_positive_fit = fit_component(fp_family, ds.fp_scores_on_positives(), "theta3 (FP scores on positives)");
        params.theta3 = out.fp_positive_fit->distribution();
    }

    out.parameter_order = parameter_names(params);
    out.covariance = asymptotic_covariance(params, c);
    out.loglik = loglikelihood(params, ds);
    return out;
}

}  // namespace froc
