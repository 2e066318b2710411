#pragma once

// Synthetic FROC data with per-subject random effects, and coverage studies
// of the parametric (IDCA) and empirical (bootstrap) confidence intervals.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "froc/dataset.hpp"
#include "froc/idca.hpp"

namespace froc {

struct SimConfig {
    int n_pos = 100;                 // positive subjects
    int n_neg = 100;                 // negative subjects
    int lesions_per_subject = 2;
    double p0 = 0.8;                 // detection probability
    double lambda = 1.0;             // FP mean on negatives
    double lambda2 = 0.0;            // FP mean on positives
    double mu1 = 2.0, sigma1 = 1.0;  // TP scores
    double mu2 = 1.0, sigma2 = 1.0;  // FP scores
    double sigma01 = 0.0;            // SD of the per-subject TP random effect
    double sigma02 = 0.0;            // SD of the per-subject FP random effect
    double q = 0.1;                  // fixed FPF for the LLF index
    long replications = 1000;
    double alpha = 0.05;
    int bootstrap = 500;             // B for the empirical method
    std::uint64_t master_seed = 20240601;
    int threads = 0;                 // 0 = OpenMP default

    void validate() const;
    bool uncorrelated() const { return sigma01 == 0.0 && sigma02 == 0.0; }
    // Model parameters the data are drawn from (exact when uncorrelated).
    IdcaParams model_params() const;
};

// Replication rep_index of the scenario; a pure function of (cfg, rep_index).
FrocDataset generate_dataset(const SimConfig& cfg, long rep_index);

enum class IndexKind { Auc, LlfQ };
enum class Method { Proposed, Empirical };

std::string_view index_kind_name(IndexKind k);
std::string_view method_name(Method m);

inline constexpr long kOracleDraws = 10'000'000;
inline constexpr double kOracleMaxStdError = 2e-4;

struct OracleValue {
    double value = 0.0;
    double mc_std_error = 0.0;  // 0 for closed-form values
    bool exact = true;
};

// Closed forms when uncorrelated; otherwise a Monte Carlo evaluation of the
// defining probabilities over `draws` simulated subjects (pairs). Throws
// NumericalError when the Monte Carlo standard error reaches kOracleMaxStdError.
OracleValue true_index_value(const SimConfig& cfg, IndexKind index, long draws = kOracleDraws);

// Monte Carlo pieces, exposed for the kernels and tests.
struct MomentSums {
    double sum = 0.0;
    double sum_sq = 0.0;
    long count = 0;

    void add(const MomentSums& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        count += o.count;
    }
};
inline constexpr long kOracleChunk = 1 << 16;
// Kernel psi(a, b) over `count` independent (lesion, negative subject) pairs.
MomentSums oracle_auc_chunk(const SimConfig& cfg, long chunk_index, long count);
// LLF at the empirical FPF-q threshold of one batch of negative subjects.
double oracle_llf_batch(const SimConfig& cfg, long batch_index, long batch_size);

struct CoverageCell {
    Method method = Method::Proposed;
    IndexKind index = IndexKind::Auc;
    double truth = 0.0;
    double coverage = 0.0;
    double mean_ci_length = 0.0;
    long replications_used = 0;
    long failures = 0;
};

struct CoverageResult {
    SimConfig config;
    std::vector<CoverageCell> cells;

    const CoverageCell& cell(Method m, IndexKind k) const;
};

// One replication's outcome for every requested (method, index) cell.
struct CellOutcome {
    bool failed = false;
    bool covered = false;
    double length = 0.0;
};

struct CoverageTask {
    SimConfig config;
    std::vector<Method> methods;
    std::vector<IndexKind> indices;
    double truth_auc = 0.0;
    double truth_llf = 0.0;

    // Cells in (method, index) order; empirical LLF is not defined and skipped.
    std::vector<std::pair<Method, IndexKind>> cells() const;
};

std::vector<CellOutcome> run_replicate(const CoverageTask& task, long rep_index);

inline constexpr double kMaxFailureFraction = 0.05;

// Throws NumericalError when more than 5% of the replications fail in a cell.
CoverageResult coverage_experiment(const SimConfig& cfg, const std::vector<Method>& methods,
                                   const std::vector<IndexKind>& indices);
// Same computation through the serial reference loop.
CoverageResult coverage_experiment_serial(const SimConfig& cfg, const std::vector<Method>& methods,
                                          const std::vector<IndexKind>& indices);

}  // namespace froc
