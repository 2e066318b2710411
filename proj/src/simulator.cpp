#include "froc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "froc/empirical.hpp"
#include "froc/errors.hpp"
#include "froc/indices.hpp"
#include "froc/kernels.hpp"
#include "froc/rng.hpp"

namespace froc {

namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
constexpr long kOracleLlfBatches = 20;
// Keeps LLF oracle streams apart from the AUC oracle chunks.
constexpr std::uint64_t kLlfStreamOffset = 1ULL << 40;

int draw_poisson(Rng& rng, double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<int>(mean)(rng);
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("invalid simulation config: " + what);
}

}  // namespace

void SimConfig::validate() const {
    require(n_pos >= 1 && n_neg >= 1, "n_pos and n_neg must be >= 1");
    require(lesions_per_subject >= 1, "lesions_per_subject must be >= 1");
    require(p0 > 0.0 && p0 < 1.0, "p0 must lie in (0, 1)");
    require(lambda > 0.0, "lambda must be > 0");
    require(lambda2 >= 0.0, "lambda2 must be >= 0");
    require(sigma1 > 0.0 && sigma2 > 0.0, "sigma1 and sigma2 must be > 0");
    require(sigma01 >= 0.0 && sigma02 >= 0.0, "random-effect SDs must be >= 0");
    require(q > 0.0 && q < -std::expm1(-lambda), "q must lie in (0, 1 - exp(-lambda))");
    require(replications >= 1, "replications must be >= 1");
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(bootstrap >= kMinBootstrapReplicates, "bootstrap must be >= 100");
}

IdcaParams SimConfig::model_params() const {
    IdcaParams p;
    p.p = p0;
    p.lambda = lambda;
    p.lambda2 = lambda2;
    p.theta1 = ScoreDistribution::normal(mu1, sigma1);
    p.theta2 = ScoreDistribution::normal(mu2, sigma2);
    if (lambda2 > 0.0) p.theta3 = ScoreDistribution::normal(mu2, sigma2);
    return p;
}

FrocDataset generate_dataset(const SimConfig& cfg, long rep_index) {
    Rng rng = make_stream(cfg.master_seed, StreamKind::Dataset, static_cast<std::uint64_t>(rep_index));
    std::normal_distribution<double> z(0.0, 1.0);
    std::bernoulli_distribution detect(cfg.p0);

    FrocDataset ds;
    ds.positives.reserve(static_cast<std::size_t>(cfg.n_pos));
    for (int i = 0; i < cfg.n_pos; ++i) {
        PositiveSubject s;
        s.id = "P" + std::to_string(i + 1);
        s.lesion_count = cfg.lesions_per_subject;
        const double effect = cfg.sigma01 * z(rng);
        for (int l = 0; l < cfg.lesions_per_subject; ++l) {
            const bool hit = detect(rng);
            s.detected.push_back(hit);
            if (hit) s.tp_scores.push_back(cfg.mu1 + effect + cfg.sigma1 * z(rng));
        }
        if (cfg.lambda2 > 0.0) {
            const double fp_effect = cfg.sigma02 * z(rng);
            const int n = draw_poisson(rng, cfg.lambda2);
            for (int k = 0; k < n; ++k) s.fp_scores.push_back(cfg.mu2 + fp_effect + cfg.sigma2 * z(rng));
        }
        ds.positives.push_back(std::move(s));
    }
    ds.negatives.reserve(static_cast<std::size_t>(cfg.n_neg));
    for (int j = 0; j < cfg.n_neg; ++j) {
        NegativeSubject s;
        s.id = "N" + std::to_string(j + 1);
        const double effect = cfg.sigma02 * z(rng);
        const int m = draw_poisson(rng, cfg.lambda);
        for (int k = 0; k < m; ++k) s.fp_scores.push_back(cfg.mu2 + effect + cfg.sigma2 * z(rng));
        ds.negatives.push_back(std::move(s));
    }
    return ds;
}

std::string_view index_kind_name(IndexKind k) { return k == IndexKind::Auc ? "auc" : "llf_q"; }
std::string_view method_name(Method m) { return m == Method::Proposed ? "proposed" : "empirical"; }

MomentSums oracle_auc_chunk(const SimConfig& cfg, long chunk_index, long count) {
    Rng rng = make_stream(cfg.master_seed, StreamKind::Oracle, static_cast<std::uint64_t>(chunk_index));
    std::normal_distribution<double> z(0.0, 1.0);
    std::bernoulli_distribution detect(cfg.p0);
    std::poisson_distribution<int> fp_count(cfg.lambda);
    MomentSums sums;
    for (long i = 0; i < count; ++i) {
        const double lesion_effect = cfg.sigma01 * z(rng);
        const double a = detect(rng) ? cfg.mu1 + lesion_effect + cfg.sigma1 * z(rng) : kMinusInf;
        const double neg_effect = cfg.sigma02 * z(rng);
        const int m = fp_count(rng);
        double b = kMinusInf;
        for (int k = 0; k < m; ++k) b = std::max(b, cfg.mu2 + neg_effect + cfg.sigma2 * z(rng));
        const double psi = a > b ? 1.0 : (a == b ? 0.5 : 0.0);
        sums.sum += psi;
        sums.sum_sq += psi * psi;
    }
    sums.count = count;
    return sums;
}

double oracle_llf_batch(const SimConfig& cfg, long batch_index, long batch_size) {
    Rng rng = make_stream(cfg.master_seed, StreamKind::Oracle, kLlfStreamOffset + static_cast<std::uint64_t>(batch_index));
    std::normal_distribution<double> z(0.0, 1.0);
    std::poisson_distribution<int> fp_count(cfg.lambda);
    std::vector<double> maxima(static_cast<std::size_t>(batch_size));
    for (auto& b : maxima) {
        const double effect = cfg.sigma02 * z(rng);
        const int m = fp_count(rng);
        b = kMinusInf;
        for (int k = 0; k < m; ++k) b = std::max(b, cfg.mu2 + effect + cfg.sigma2 * z(rng));
    }
    // Threshold with a fraction q of negative subjects scoring above it.
    const auto k = static_cast<std::size_t>(std::llround(cfg.q * static_cast<double>(batch_size)));
    std::nth_element(maxima.begin(), maxima.begin() + static_cast<long>(k), maxima.end(), std::greater<>());
    const double zeta = maxima[k];
    if (!std::isfinite(zeta)) throw NumericalError("LLF oracle: q exceeds the simulated fraction of marked negatives");
    // A TP score is marginally N(mu1, sqrt(sigma1^2 + sigma01^2)) whatever the random effect.
    const double sd = std::sqrt(cfg.sigma1 * cfg.sigma1 + cfg.sigma01 * cfg.sigma01);
    return cfg.p0 * (1.0 - ScoreDistribution::normal(cfg.mu1, sd).cdf(zeta));
}

OracleValue true_index_value(const SimConfig& cfg, IndexKind index, long draws) {
    if (cfg.uncorrelated()) {
        const IdcaParams params = cfg.model_params();
        return {index == IndexKind::Auc ? afroc_auc(params) : llf_at_fpf(params, cfg.q), 0.0, true};
    }
    OracleValue out;
    out.exact = false;
    if (index == IndexKind::Auc) {
        const MomentSums s = kernels::omp::oracle_auc(cfg, draws, cfg.threads);
        const double n = static_cast<double>(s.count);
        out.value = s.sum / n;
        out.mc_std_error = std::sqrt(std::max(0.0, s.sum_sq / n - out.value * out.value) / n);
    } else {
        const auto batches = kernels::omp::oracle_llf(cfg, kOracleLlfBatches, draws / kOracleLlfBatches, cfg.threads);
        double mean = 0.0;
        for (double v : batches) mean += v;
        mean /= static_cast<double>(batches.size());
        double ss = 0.0;
        for (double v : batches) ss += (v - mean) * (v - mean);
        out.value = mean;
        out.mc_std_error = std::sqrt(ss / static_cast<double>(batches.size() - 1) / static_cast<double>(batches.size()));
    }
    if (!(out.mc_std_error < kOracleMaxStdError))
        throw NumericalError("Monte Carlo oracle standard error " + std::to_string(out.mc_std_error) +
                             " not below " + std::to_string(kOracleMaxStdError));
    return out;
}

const CoverageCell& CoverageResult::cell(Method m, IndexKind k) const {
    for (const auto& c : cells)
        if (c.method == m && c.index == k) return c;
    throw std::out_of_range("coverage cell (" + std::string(method_name(m)) + ", " + std::string(index_kind_name(k)) +
                            ") not computed");
}

std::vector<std::pair<Method, IndexKind>> CoverageTask::cells() const {
    std::vector<std::pair<Method, IndexKind>> out;
    for (Method m : methods)
        for (IndexKind k : indices)
            if (!(m == Method::Empirical && k == IndexKind::LlfQ)) out.emplace_back(m, k);
    return out;
}

std::vector<CellOutcome> run_replicate(const CoverageTask& task, long rep_index) {
    const auto cells = task.cells();
    std::vector<CellOutcome> out(cells.size());
    const SimConfig& cfg = task.config;
    const FrocDataset ds = generate_dataset(cfg, rep_index);

    auto record = [](CellOutcome& o, double lo, double hi, double truth) {
        o.covered = lo <= truth && truth <= hi;
        o.length = hi - lo;
    };

    std::optional<IdcaFit> fitted;
    bool fit_failed = false;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto [method, index] = cells[c];
        const double truth = index == IndexKind::Auc ? task.truth_auc : task.truth_llf;
        try {
            if (method == Method::Proposed) {
                if (fit_failed) throw NumericalError("fit failed");
                if (!fitted) fitted = fit(ds, Family::Normal, Family::Normal);
                const IndexFunction f = index == IndexKind::Auc ? auc_index() : llf_index(cfg.q);
                const IndexEstimate est = ci_index(*fitted, f, cfg.alpha);
                record(out[c], est.ci_low, est.ci_high, truth);
            } else {
                const auto seed = stream_seed(cfg.master_seed, StreamKind::Bootstrap, static_cast<std::uint64_t>(rep_index));
                const IndexEstimate est = bootstrap_ci(AucInputs::of(ds), cfg.bootstrap, cfg.alpha, seed, 1);
                record(out[c], est.ci_low, est.ci_high, truth);
            }
        } catch (const std::exception&) {
            if (method == Method::Proposed && !fitted) fit_failed = true;
            out[c].failed = true;
        }
    }
    return out;
}

namespace {

CoverageTask make_task(const SimConfig& cfg, const std::vector<Method>& methods, const std::vector<IndexKind>& indices) {
    cfg.validate();
    if (cfg.replications < 100) throw std::invalid_argument("coverage experiment needs at least 100 replications");
    CoverageTask task{cfg, methods, indices, 0.0, 0.0};
    for (IndexKind k : indices) {
        const double v = true_index_value(cfg, k).value;
        (k == IndexKind::Auc ? task.truth_auc : task.truth_llf) = v;
    }
    return task;
}

CoverageResult aggregate(const CoverageTask& task, const std::vector<std::vector<CellOutcome>>& reps) {
    CoverageResult result;
    result.config = task.config;
    const auto cells = task.cells();
    for (std::size_t c = 0; c < cells.size(); ++c) {
        CoverageCell cell;
        cell.method = cells[c].first;
        cell.index = cells[c].second;
        cell.truth = cell.index == IndexKind::Auc ? task.truth_auc : task.truth_llf;
        long covered = 0;
        double length = 0.0;
        for (const auto& r : reps) {
            const CellOutcome& o = r[c];
            if (o.failed) {
                ++cell.failures;
                continue;
            }
            ++cell.replications_used;
            covered += o.covered ? 1 : 0;
            length += o.length;
        }
        if (cell.failures > kMaxFailureFraction * static_cast<double>(reps.size()))
            throw NumericalError(std::to_string(cell.failures) + " of " + std::to_string(reps.size()) + " replications failed for " +
                                 std::string(method_name(cell.method)) + "/" + std::string(index_kind_name(cell.index)) +
                                 "; scenario ill-posed at this sample size");
        if (cell.replications_used > 0) {
            cell.coverage = static_cast<double>(covered) / static_cast<double>(cell.replications_used);
            cell.mean_ci_length = length / static_cast<double>(cell.replications_used);
        }
        result.cells.push_back(cell);
    }
    return result;
}

}  // namespace

CoverageResult coverage_experiment(const SimConfig& cfg, const std::vector<Method>& methods,
                                   const std::vector<IndexKind>& indices) {
    const CoverageTask task = make_task(cfg, methods, indices);
    return aggregate(task, kernels::omp::coverage_replicates(task, cfg.threads));
}

CoverageResult coverage_experiment_serial(const SimConfig& cfg, const std::vector<Method>& methods,
                                          const std::vector<IndexKind>& indices) {
    const CoverageTask task = make_task(cfg, methods, indices);
    return aggregate(task, kernels::serial::coverage_replicates(task));
}

}  // namespace froc
