#include "froc/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "froc/kernels.hpp"
#include "froc/rng.hpp"

namespace froc {

namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

void require_nonempty(const FrocDataset& ds) {
    if (ds.negatives.empty()) throw std::invalid_argument("empirical AUC needs at least one negative subject");
    if (ds.total_lesions() < 1) throw std::invalid_argument("empirical AUC needs at least one lesion");
}

}  // namespace

AucInputs AucInputs::of(const FrocDataset& ds) {
    AucInputs in;
    in.lesion_values.reserve(ds.positives.size());
    for (const auto& s : ds.positives) {
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(s.lesion_count));
        std::size_t k = 0;
        for (bool hit : s.detected) values.push_back(hit ? s.tp_scores[k++] : kMinusInf);
        in.lesion_values.push_back(std::move(values));
    }
    in.negative_max.reserve(ds.negatives.size());
    for (const auto& s : ds.negatives)
        in.negative_max.push_back(s.fp_scores.empty() ? kMinusInf
                                                      : *std::max_element(s.fp_scores.begin(), s.fp_scores.end()));
    return in;
}

double auc_from_values(std::span<const double> lesion_values, std::span<const double> negative_max) {
    if (lesion_values.empty() || negative_max.empty()) throw std::invalid_argument("AUC needs lesions and negatives");
    std::vector<double> b(negative_max.begin(), negative_max.end());
    std::sort(b.begin(), b.end());
    double score = 0.0;
    for (double a : lesion_values) {
        const auto lo = std::lower_bound(b.begin(), b.end(), a);
        const auto hi = std::upper_bound(lo, b.end(), a);
        score += static_cast<double>(lo - b.begin()) + 0.5 * static_cast<double>(hi - lo);
    }
    return score / (static_cast<double>(lesion_values.size()) * static_cast<double>(b.size()));
}

double empirical_auc(const FrocDataset& ds) {
    require_nonempty(ds);
    const AucInputs in = AucInputs::of(ds);
    std::vector<double> lesions;
    for (const auto& v : in.lesion_values) lesions.insert(lesions.end(), v.begin(), v.end());
    return auc_from_values(lesions, in.negative_max);
}

EmpiricalAfroc empirical_curve(const FrocDataset& ds) {
    require_nonempty(ds);
    const AucInputs in = AucInputs::of(ds);
    std::vector<double> a;
    for (const auto& v : in.lesion_values) a.insert(a.end(), v.begin(), v.end());
    std::vector<double> b = in.negative_max;
    std::sort(a.begin(), a.end(), std::greater<>());
    std::sort(b.begin(), b.end(), std::greater<>());

    std::vector<double> thresholds;
    for (double x : a)
        if (std::isfinite(x)) thresholds.push_back(x);
    for (double x : b)
        if (std::isfinite(x)) thresholds.push_back(x);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const double total_lesions = static_cast<double>(a.size());
    const double total_negatives = static_cast<double>(b.size());
    EmpiricalAfroc out;
    out.points.push_back({0.0, 0.0});
    std::size_t ia = 0, ib = 0;
    for (double t : thresholds) {
        while (ia < a.size() && a[ia] >= t) ++ia;
        while (ib < b.size() && b[ib] >= t) ++ib;
        out.points.push_back({static_cast<double>(ib) / total_negatives, static_cast<double>(ia) / total_lesions});
    }
    double area = 0.0;
    for (std::size_t i = 1; i < out.points.size(); ++i) {
        const auto& p0 = out.points[i - 1];
        const auto& p1 = out.points[i];
        area += (p1.fpf - p0.fpf) * 0.5 * (p0.llf + p1.llf);
    }
    const auto& last = out.points.back();
    area += (1.0 - last.fpf) * 0.5 * (last.llf + 1.0);
    out.auc = area;
    return out;
}

double bootstrap_replicate_auc(const AucInputs& inputs, std::uint64_t seed, std::uint64_t index) {
    Rng rng = make_stream(seed, StreamKind::Resample, index);
    const auto k1 = inputs.lesion_values.size();
    const auto k2 = inputs.negative_max.size();
    std::uniform_int_distribution<std::size_t> pick_pos(0, k1 - 1);
    std::uniform_int_distribution<std::size_t> pick_neg(0, k2 - 1);
    thread_local std::vector<double> lesions;
    thread_local std::vector<double> negatives;
    lesions.clear();
    negatives.clear();
    for (std::size_t i = 0; i < k1; ++i) {
        const auto& v = inputs.lesion_values[pick_pos(rng)];
        lesions.insert(lesions.end(), v.begin(), v.end());
    }
    for (std::size_t j = 0; j < k2; ++j) negatives.push_back(inputs.negative_max[pick_neg(rng)]);
    return auc_from_values(lesions, negatives);
}

IndexEstimate bootstrap_ci(const AucInputs& inputs, int replicates, double alpha, std::uint64_t seed, int threads) {
    if (replicates < kMinBootstrapReplicates)
        throw std::invalid_argument("bootstrap needs at least " + std::to_string(kMinBootstrapReplicates) +
                                    " replicates");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (inputs.lesion_values.empty() || inputs.negative_max.empty())
        throw std::invalid_argument("bootstrap needs positive and negative subjects");

    std::vector<double> lesions;
    for (const auto& v : inputs.lesion_values) lesions.insert(lesions.end(), v.begin(), v.end());
    IndexEstimate est;
    est.name = "empirical_auc";
    est.alpha = alpha;
    est.value = auc_from_values(lesions, inputs.negative_max);

    const std::vector<double> aucs = threads == 1 ? kernels::serial::bootstrap_aucs(inputs, replicates, seed)
                                                  : kernels::omp::bootstrap_aucs(inputs, replicates, seed, threads);
    double mean = 0.0;
    for (double x : aucs) mean += x;
    mean /= static_cast<double>(aucs.size());
    double ss = 0.0;
    for (double x : aucs) ss += (x - mean) * (x - mean);
    est.std_error = std::sqrt(ss / static_cast<double>(aucs.size() - 1));
    const double z = normal_quantile(1.0 - alpha / 2.0);
    est.ci_low = est.value - z * est.std_error;
    est.ci_high = est.value + z * est.std_error;
    return est;
}

IndexEstimate bootstrap_ci(const FrocDataset& ds, int replicates, double alpha, std::uint64_t seed, int threads) {
    require_nonempty(ds);
    if (ds.positives.empty()) throw std::invalid_argument("bootstrap needs positive subjects");
    return bootstrap_ci(AucInputs::of(ds), replicates, alpha, seed, threads);
}

}  // namespace froc
