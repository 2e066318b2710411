#include "froc/io.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <stdexcept>

#include "froc/errors.hpp"

namespace froc {

namespace {

std::string num(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json matrix_rows(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Json fit_diagnostics(const FitResult& r) {
    return Json{{"family", family_name(r.family)}, {"n", r.n},           {"loglik", r.loglik},
                {"converged", r.converged},       {"iterations", r.iterations}};
}

std::vector<Json> as_list(const Json& v) {
    if (v.is_array()) return std::vector<Json>(v.begin(), v.end());
    return {v};
}

}  // namespace

Json to_json(const ScoreDistribution& d) {
    Json params = Json::object();
    const auto names = d.param_names();
    params[std::string(names[0])] = d.params()[0];
    params[std::string(names[1])] = d.params()[1];
    return Json{{"family", family_name(d.family())}, {"values", {d.params()[0], d.params()[1]}}, {"params", params}};
}

Json to_json(const IdcaFit& fit) {
    Json params{{"p", fit.params.p},
                {"lambda", fit.params.lambda},
                {"lambda2", fit.params.lambda2},
                {"theta1", to_json(fit.params.theta1)},
                {"theta2", to_json(fit.params.theta2)},
                {"theta3", fit.params.theta3 ? to_json(*fit.params.theta3) : Json(nullptr)}};
    Json flat = Json::array();
    for (Eigen::Index i = 0; i < fit.covariance.rows(); ++i)
        for (Eigen::Index j = 0; j < fit.covariance.cols(); ++j) flat.push_back(fit.covariance(i, j));
    const auto& c = fit.counts;
    Json diag{{"theta1", fit_diagnostics(fit.tp_fit)}, {"theta2", fit_diagnostics(fit.fp_fit)}};
    diag["theta3"] = fit.fp_positive_fit ? fit_diagnostics(*fit.fp_positive_fit) : Json(nullptr);
    return Json{{"params", params},
                {"parameter_order", fit.parameter_order},
                {"covariance", flat},
                {"covariance_units", "estimator"},
                {"counts",
                 {{"K1", c.num_positive},
                  {"K2", c.num_negative},
                  {"T", c.total_lesions},
                  {"sum_L", c.total_detected},
                  {"sum_m", c.fp_on_negatives},
                  {"sum_n", c.fp_on_positives}}},
                {"loglik", fit.loglik},
                {"component_fits", diag},
                {"metadata",
                 {{"extension_blocks", {"lambda2", "theta3"}},
                  {"extension_note",
                   "lambda2 and theta3 covariance blocks are built by structural analogy with lambda and theta2"}}}};
}

Json to_json(const IndexEstimate& est) {
    return Json{{"name", est.name},     {"value", est.value},     {"stderr", est.std_error},
                {"ci_low", est.ci_low}, {"ci_high", est.ci_high}, {"alpha", est.alpha}};
}

Json to_json(const EllipseSpec& spec) {
    Json boundary = Json::array();
    for (const auto& pt : spec.boundary) boundary.push_back({pt[0], pt[1]});
    Json center = Json::array();
    for (Eigen::Index i = 0; i < spec.center.size(); ++i) center.push_back(spec.center[i]);
    return Json{{"names", spec.names},        {"center", center}, {"shape", matrix_rows(spec.shape)},
                {"threshold", spec.threshold}, {"df", spec.df},    {"alpha", spec.alpha},
                {"boundary", boundary}};
}

Json to_json(const SummaryStats& s) {
    return Json{{"K1", s.num_positive},
                {"K2", s.num_negative},
                {"T", s.total_lesions},
                {"total_tp_marks", s.total_tp_marks},
                {"total_fp_on_positives", s.total_fp_on_positives},
                {"total_fp_on_negatives", s.total_fp_on_negatives},
                {"mean_lesions_per_positive", optional_number(s.mean_lesions_per_positive)},
                {"mean_fp_per_positive", optional_number(s.mean_fp_per_positive)},
                {"mean_fp_per_negative", optional_number(s.mean_fp_per_negative)},
                {"fraction_negatives_without_fp", optional_number(s.fraction_negatives_without_fp)}};
}

Json to_json(const ValidationReport& report) { return Json{{"ok", report.ok()}, {"issues", report.issues}}; }

Json to_json(const KsResult& ks) { return Json{{"statistic", ks.statistic}, {"p_value", ks.p_value}}; }

Json to_json(const std::vector<CurvePoint>& curve) {
    Json pts = Json::array();
    for (const auto& p : curve) {
        Json j{{"fpf", p.fpf}, {"llf", p.llf}, {"band_low", optional_number(p.band_low)},
               {"band_high", optional_number(p.band_high)}};
        if (p.error) j["error"] = *p.error;
        pts.push_back(j);
    }
    return Json{{"points", pts}};
}

Json to_json(const EmpiricalAfroc& curve) {
    Json pts = Json::array();
    for (const auto& p : curve.points) pts.push_back({{"fpf", p.fpf}, {"llf", p.llf}});
    return Json{{"auc", curve.auc}, {"points", pts}};
}

void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out) {
    out << "fpf,llf,band_low,band_high\n";
    for (const auto& p : curve) {
        out << num(p.fpf) << ',' << num(p.llf) << ',';
        if (p.band_low) out << num(*p.band_low);
        out << ',';
        if (p.band_high) out << num(*p.band_high);
        out << '\n';
    }
}

void write_empirical_curve_csv(const EmpiricalAfroc& curve, std::ostream& out) {
    out << "fpf,llf\n";
    for (const auto& p : curve.points) out << num(p.fpf) << ',' << num(p.llf) << '\n';
}

void write_ellipse_csv(const EllipseSpec& spec, std::ostream& out) {
    out << "h1,h2\n";
    for (const auto& pt : spec.boundary) out << num(pt[0]) << ',' << num(pt[1]) << '\n';
}

SimulationGrid parse_simulation_grid(const Json& doc) {
    if (!doc.is_object()) throw DataError("simulation config must be a JSON object");
    SimulationGrid grid;
    std::vector<SimConfig> configs{SimConfig{}};

    static const std::vector<std::string> known = {
        "lambda", "p0",     "sigma0", "sigma01", "sigma02", "n",     "n_pos",        "n_neg",     "lesions_per_subject",
        "lambda2", "mu1",   "mu2",    "sigma1",  "sigma2",  "q",     "replications", "alpha",     "bootstrap",
        "seed",   "methods", "indices", "threads"};
    for (const auto& [key, value] : doc.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw DataError("simulation config: unknown key '" + key + "'");

    auto expand = [&](const char* key, auto&& apply) {
        if (!doc.contains(key)) return;
        std::vector<SimConfig> next;
        for (const auto& base : configs)
            for (const auto& v : as_list(doc.at(key))) {
                if (!v.is_number()) throw DataError(std::string("simulation config: '") + key + "' must be numeric");
                SimConfig c = base;
                apply(c, v);
                next.push_back(c);
            }
        configs = std::move(next);
    };
    expand("lambda", [](SimConfig& c, const Json& v) { c.lambda = v.get<double>(); });
    expand("p0", [](SimConfig& c, const Json& v) { c.p0 = v.get<double>(); });
    expand("sigma0", [](SimConfig& c, const Json& v) { c.sigma01 = c.sigma02 = v.get<double>(); });
    expand("sigma01", [](SimConfig& c, const Json& v) { c.sigma01 = v.get<double>(); });
    expand("sigma02", [](SimConfig& c, const Json& v) { c.sigma02 = v.get<double>(); });
    expand("n", [](SimConfig& c, const Json& v) { c.n_pos = c.n_neg = v.get<int>(); });
    expand("n_pos", [](SimConfig& c, const Json& v) { c.n_pos = v.get<int>(); });
    expand("n_neg", [](SimConfig& c, const Json& v) { c.n_neg = v.get<int>(); });
    expand("lesions_per_subject", [](SimConfig& c, const Json& v) { c.lesions_per_subject = v.get<int>(); });
    expand("lambda2", [](SimConfig& c, const Json& v) { c.lambda2 = v.get<double>(); });
    expand("mu1", [](SimConfig& c, const Json& v) { c.mu1 = v.get<double>(); });
    expand("mu2", [](SimConfig& c, const Json& v) { c.mu2 = v.get<double>(); });
    expand("sigma1", [](SimConfig& c, const Json& v) { c.sigma1 = v.get<double>(); });
    expand("sigma2", [](SimConfig& c, const Json& v) { c.sigma2 = v.get<double>(); });
    expand("q", [](SimConfig& c, const Json& v) { c.q = v.get<double>(); });
    expand("replications", [](SimConfig& c, const Json& v) { c.replications = v.get<long>(); });
    expand("alpha", [](SimConfig& c, const Json& v) { c.alpha = v.get<double>(); });
    expand("bootstrap", [](SimConfig& c, const Json& v) { c.bootstrap = v.get<int>(); });
    expand("seed", [](SimConfig& c, const Json& v) { c.master_seed = v.get<std::uint64_t>(); });
    expand("threads", [](SimConfig& c, const Json& v) { c.threads = v.get<int>(); });

    if (doc.contains("methods")) {
        grid.methods.clear();
        for (const auto& m : as_list(doc.at("methods"))) {
            const auto s = m.get<std::string>();
            if (s == "proposed")
                grid.methods.push_back(Method::Proposed);
            else if (s == "empirical")
                grid.methods.push_back(Method::Empirical);
            else
                throw DataError("simulation config: unknown method '" + s + "'");
        }
    }
    if (doc.contains("indices")) {
        grid.indices.clear();
        for (const auto& m : as_list(doc.at("indices"))) {
            const auto s = m.get<std::string>();
            if (s == "auc")
                grid.indices.push_back(IndexKind::Auc);
            else if (s == "llf_q" || s == "llf")
                grid.indices.push_back(IndexKind::LlfQ);
            else
                throw DataError("simulation config: unknown index '" + s + "'");
        }
    }
    for (const auto& c : configs) {
        try {
            c.validate();
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what());
        }
    }
    grid.scenarios = std::move(configs);
    return grid;
}

void write_coverage_header(std::ostream& out) { out << "lambda,p0,sigma01,n,coverage,length,method,index\n"; }

void write_coverage_rows(const CoverageResult& result, std::ostream& out) {
    const SimConfig& c = result.config;
    for (const auto& cell : result.cells)
        out << num(c.lambda) << ',' << num(c.p0) << ',' << num(c.sigma01) << ',' << c.n_pos << ','
            << num(cell.coverage) << ',' << num(cell.mean_ci_length) << ',' << method_name(cell.method) << ','
            << index_kind_name(cell.index) << '\n';
}

}  // namespace froc
