#include "froc/indices.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>

#include "froc/errors.hpp"
#include "froc/quadrature.hpp"

namespace froc {

namespace {

constexpr double kDomainSlack = 1e-12;

// Runs body(i) for i in [0, n) on the OpenMP team; the first exception is
// rethrown after the loop.
template <typename Body>
void parallel_for(long n, Body&& body) {
    std::exception_ptr first;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(froc_indices_error)
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
}

double logit(double x) { return std::log(x / (1.0 - x)); }
double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double normal_quantile(double u) { return boost::math::quantile(boost::math::normal_distribution<double>(), u); }

double chi_square_quantile(double u, int df) {
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), u);
}

double fpf_at(const IdcaParams& params, double zeta) {
    return -std::expm1(-params.lambda * (1.0 - params.theta2.cdf(zeta)));
}

double llf_at(const IdcaParams& params, double zeta) { return params.p * (1.0 - params.theta1.cdf(zeta)); }

double max_fpf(const IdcaParams& params) { return -std::expm1(-params.lambda); }

double auc_expectation(const IdcaParams& params, int nodes) {
    const QuadratureRule& rule = gauss_legendre_unit(nodes);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double y = params.theta1.quantile(rule.nodes[i]);
        sum += rule.weights[i] * std::exp(params.lambda * params.theta2.cdf(y));
    }
    return sum;
}

double afroc_auc(const IdcaParams& params) {
    const double e = std::exp(-params.lambda);
    const double tail = 0.5 * (1.0 + params.p) * e;
    if (params.lambda == 0.0) return tail;
    const double coarse = auc_expectation(params, kAucQuadratureNodes);
    const double fine = auc_expectation(params, 2 * kAucQuadratureNodes);
    const double auc = params.p * e * (coarse - 1.0) + tail;
    const double auc_fine = params.p * e * (fine - 1.0) + tail;
    if (!(std::abs(auc - auc_fine) <= kAucQuadratureTolerance))
        throw NumericalError("AUC quadrature did not converge (201 vs 402 nodes differ by " +
                             std::to_string(std::abs(auc - auc_fine)) + ")");
    return std::clamp(auc, 0.0, 1.0);
}

double llf_at_fpf(const IdcaParams& params, double q) {
    const double top = max_fpf(params);
    if (params.lambda <= 0.0)
        throw NumericalError("LLF at fixed FPF undefined for lambda = 0 (no attainable FPF > 0)");
    if (!(q >= 0.0) || q > top + kDomainSlack)
        throw NumericalError("FPF " + std::to_string(q) + " outside attainable range [0, " + std::to_string(top) +
                             "] (max FPF = 1 - exp(-lambda))");
    if (q >= top) return params.p;
    const double u = std::clamp(1.0 + std::log1p(-q) / params.lambda, 0.0, 1.0);
    const double zeta = params.theta2.quantile(u);
    return std::clamp(params.p * (1.0 - params.theta1.cdf(zeta)), 0.0, params.p);
}

std::vector<CurvePoint> afroc_curve(const IdcaParams& params, int npoints) {
    if (npoints < 2) throw std::invalid_argument("afroc_curve needs at least 2 points");
    const double top = max_fpf(params);
    std::vector<CurvePoint> pts(static_cast<std::size_t>(npoints));
    parallel_for(npoints, [&](long i) {
        auto& pt = pts[static_cast<std::size_t>(i)];
        pt.fpf = (i == npoints - 1) ? top : top * static_cast<double>(i) / (npoints - 1);
        pt.llf = llf_at_fpf(params, pt.fpf);
    });
    return pts;
}

IndexFunction auc_index() { return {"afroc_auc", [](const IdcaParams& p) { return afroc_auc(p); }}; }

IndexFunction llf_index(double q) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), q);
    return {"llf_at_fpf@" + std::string(buf, ptr), [q](const IdcaParams& p) { return llf_at_fpf(p, q); }};
}

IndexFunction parameter_index(const std::string& name) {
    const std::string key = (name == "lambda1") ? "lambda" : name;
    return {name, [key](const IdcaParams& p) {
                const auto names = parameter_names(p);
                const auto it = std::find(names.begin(), names.end(), key);
                if (it == names.end()) throw std::invalid_argument("unknown parameter '" + key + "'");
                return to_vector(p)[it - names.begin()];
            }};
}

IndexFunction parse_index(std::string_view spec) {
    if (spec == "auc") return auc_index();
    if (spec.rfind("llf@", 0) == 0) {
        double q = 0.0;
        const auto rest = spec.substr(4);
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), q);
        if (ec != std::errc() || ptr != rest.data() + rest.size())
            throw std::invalid_argument("bad LLF index '" + std::string(spec) + "' (expected llf@<q>)");
        return llf_index(q);
    }
    static const char* known[] = {"p",           "lambda",       "lambda1",   "lambda2",      "theta1.mu",
                                  "theta1.sigma", "theta1.alpha", "theta1.beta", "theta2.mu",   "theta2.sigma",
                                  "theta2.alpha", "theta2.beta",  "theta3.mu", "theta3.sigma", "theta3.alpha",
                                  "theta3.beta"};
    for (const char* k : known)
        if (spec == k) return parameter_index(std::string(spec));
    throw std::invalid_argument("unknown index '" + std::string(spec) + "'");
}

Eigen::VectorXd index_gradient(const IndexFunction& f, const IdcaParams& params) {
    const Eigen::VectorXd x = to_vector(params);
    Eigen::VectorXd grad(x.size());
    auto eval = [&](const IdcaParams& p, Eigen::Index k) {
        try {
            return f.eval(p);
        } catch (const std::exception& e) {
            throw NumericalError("index '" + f.name + "' failed at perturbed coordinate " + std::to_string(k) + ": " +
                                 e.what());
        }
    };
    std::optional<double> center;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = std::max(1e-5, 1e-5 * std::abs(x[k]));
        Eigen::VectorXd up = x, down = x;
        up[k] += h;
        down[k] -= h;
        const auto pu = from_vector(params, up);
        const auto pd = from_vector(params, down);
        if (pu && pd) {
            grad[k] = (eval(*pu, k) - eval(*pd, k)) / (2.0 * h);
            continue;
        }
        if (!pu && !pd) throw NumericalError("no feasible finite-difference step for coordinate " + std::to_string(k));
        if (!center) center = eval(params, k);
        grad[k] = pu ? (eval(*pu, k) - *center) / h : (*center - eval(*pd, k)) / h;
    }
    return grad;
}

IndexEstimate ci_index(const IdcaFit& fit, const IndexFunction& f, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    IndexEstimate est;
    est.name = f.name;
    est.alpha = alpha;
    est.value = f.eval(fit.params);
    const Eigen::VectorXd g = index_gradient(f, fit.params);
    const double var = g.dot(fit.covariance * g);
    if (!(var > 0.0)) throw NumericalError("nonpositive delta-method variance for '" + f.name + "'");
    est.std_error = std::sqrt(var);
    const double z = normal_quantile(1.0 - alpha / 2.0);
    est.ci_low = est.value - z * est.std_error;
    est.ci_high = est.value + z * est.std_error;
    return est;
}

std::vector<CurvePoint> ci_llf_pointwise(const IdcaFit& fit, std::span<const double> q_grid, double alpha,
                                         bool use_logit) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    const double top = max_fpf(fit.params);
    std::vector<double> grid;
    for (double q : q_grid) {
        if (!(q >= kBandEdgeEpsilon))
            throw NumericalError("band grid point " + std::to_string(q) + " below the minimal FPF " +
                                 std::to_string(kBandEdgeEpsilon));
        if (q <= top - kBandEdgeEpsilon) grid.push_back(q);
    }
    const double z = normal_quantile(1.0 - alpha / 2.0);
    std::vector<CurvePoint> pts(grid.size());
    parallel_for(static_cast<long>(grid.size()), [&](long i) {
        auto& pt = pts[static_cast<std::size_t>(i)];
        pt.fpf = grid[static_cast<std::size_t>(i)];
        const IndexFunction f = llf_index(pt.fpf);
        pt.llf = f.eval(fit.params);
        try {
            const Eigen::VectorXd g = index_gradient(f, fit.params);
            const double var = g.dot(fit.covariance * g);
            if (!(var > 0.0)) throw NumericalError("nonpositive variance");
            if (use_logit) {
                if (!(pt.llf > 0.0 && pt.llf < fit.params.p && pt.llf < 1.0))
                    throw NumericalError("logit band undefined at LLF = " + std::to_string(pt.llf));
                const double se = std::sqrt(var) / (pt.llf * (1.0 - pt.llf));
                pt.band_low = expit(logit(pt.llf) - z * se);
                pt.band_high = expit(logit(pt.llf) + z * se);
            } else {
                const double se = std::sqrt(var);
                pt.band_low = pt.llf - z * se;
                pt.band_high = pt.llf + z * se;
            }
        } catch (const std::exception& e) {
            pt.band_low.reset();
            pt.band_high.reset();
            pt.error = e.what();
        }
    });
    return pts;
}

bool EllipseSpec::contains(const Eigen::VectorXd& h) const {
    const Eigen::VectorXd d = h - center;
    return d.dot(shape.llt().solve(d)) <= threshold;
}

EllipseSpec confidence_ellipse(const IdcaFit& fit, std::span<const IndexFunction> indices, double alpha,
                               DfMode df_mode) {
    const auto m = static_cast<Eigen::Index>(indices.size());
    if (m < 2 || m > fit.covariance.rows())
        throw std::invalid_argument("confidence_ellipse needs between 2 and " + std::to_string(fit.covariance.rows()) +
                                    " indices");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    EllipseSpec spec;
    spec.alpha = alpha;
    spec.center.resize(m);
    Eigen::MatrixXd jac(m, fit.covariance.rows());
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& f = indices[static_cast<std::size_t>(i)];
        spec.names.push_back(f.name);
        spec.center[i] = f.eval(fit.params);
        jac.row(i) = index_gradient(f, fit.params).transpose();
    }
    spec.shape = jac * fit.covariance * jac.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(spec.shape);
    // Each Cholesky pivot relative to its index's own standard deviation.
    const Eigen::VectorXd pivots = llt.matrixL().toDenseMatrix().diagonal();
    const Eigen::VectorXd scale = spec.shape.diagonal().cwiseSqrt();
    if (llt.info() != Eigen::Success || !(scale.minCoeff() > 0.0) || (pivots.array() / scale.array()).minCoeff() <= 1e-6)
        throw NumericalError("singular index covariance J Sigma J' (indices linearly dependent or degenerate)");
    spec.df = static_cast<int>(df_mode == DfMode::M ? m : m - 1);
    spec.threshold = chi_square_quantile(1.0 - alpha, spec.df);
    if (m == 2) {
        const Eigen::MatrixXd lower = llt.matrixL();
        const double r = std::sqrt(spec.threshold);
        spec.boundary.reserve(kEllipseBoundaryPoints);
        for (int k = 0; k < kEllipseBoundaryPoints; ++k) {
            const double t = 2.0 * std::numbers::pi * k / kEllipseBoundaryPoints;
            const Eigen::Vector2d u(std::cos(t), std::sin(t));
            const Eigen::Vector2d pt = spec.center + r * lower * u;
            spec.boundary.push_back({pt[0], pt[1]});
        }
    }
    return spec;
}

}  // namespace froc
