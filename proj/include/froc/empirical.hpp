#pragma once

// Nonparametric AFROC estimate and its bootstrap confidence interval.
//
// Each lesion contributes a = its TP score (or -inf when missed); each
// negative subject contributes b = its highest FP score (or -inf without
// marks). The AUC is the Mann-Whitney statistic over all (lesion, negative)
// pairs with ties scored 1/2, which includes the straight closing segment of
// the curve through the -inf ties.

#include <cstdint>
#include <span>
#include <vector>

#include "froc/dataset.hpp"
#include "froc/indices.hpp"

namespace froc {

struct OperatingPoint {
    double fpf = 0.0;
    double llf = 0.0;
};

struct EmpiricalAfroc {
    std::vector<OperatingPoint> points;  // from (0, 0), threshold decreasing
    double auc = 0.0;
};

// Per-subject score summaries; what the AUC kernel consumes.
struct AucInputs {
    std::vector<std::vector<double>> lesion_values;  // per positive subject
    std::vector<double> negative_max;                // per negative subject

    static AucInputs of(const FrocDataset& ds);
};

// Mann-Whitney AUC of lesion values against negative maxima, O((T + K2) log K2).
double auc_from_values(std::span<const double> lesion_values, std::span<const double> negative_max);

double empirical_auc(const FrocDataset& ds);
EmpiricalAfroc empirical_curve(const FrocDataset& ds);

inline constexpr int kMinBootstrapReplicates = 100;

// Stratified subject-level bootstrap: K1 positives and K2 negatives drawn with
// replacement, B times. Normal-approximation interval around the point estimate
// using the standard deviation of the replicate AUCs. threads = 0 uses the
// OpenMP default; the result does not depend on the thread count.
IndexEstimate bootstrap_ci(const FrocDataset& ds, int replicates, double alpha, std::uint64_t seed, int threads = 0);
IndexEstimate bootstrap_ci(const AucInputs& inputs, int replicates, double alpha, std::uint64_t seed, int threads = 0);

// AUC of bootstrap replicate `index` (stream derived from seed and index).
double bootstrap_replicate_auc(const AucInputs& inputs, std::uint64_t seed, std::uint64_t index);

}  // namespace froc
