#include "froc/kernels.hpp"

#include <algorithm>

namespace froc::kernels::serial {

std::vector<double> bootstrap_aucs(const AucInputs& inputs, int replicates, std::uint64_t seed) {
    std::vector<double> out(static_cast<std::size_t>(replicates));
    for (int b = 0; b < replicates; ++b)
        out[static_cast<std::size_t>(b)] = bootstrap_replicate_auc(inputs, seed, static_cast<std::uint64_t>(b));
    return out;
}

std::vector<std::vector<CellOutcome>> coverage_replicates(const CoverageTask& task) {
    std::vector<std::vector<CellOutcome>> out(static_cast<std::size_t>(task.config.replications));
    for (long r = 0; r < task.config.replications; ++r) out[static_cast<std::size_t>(r)] = run_replicate(task, r);
    return out;
}

MomentSums oracle_auc(const SimConfig& cfg, long draws) {
    MomentSums total;
    const long chunks = (draws + kOracleChunk - 1) / kOracleChunk;
    for (long c = 0; c < chunks; ++c) total.add(oracle_auc_chunk(cfg, c, std::min(kOracleChunk, draws - c * kOracleChunk)));
    return total;
}

std::vector<double> oracle_llf(const SimConfig& cfg, long batches, long batch_size) {
    std::vector<double> out(static_cast<std::size_t>(batches));
    for (long b = 0; b < batches; ++b) out[static_cast<std::size_t>(b)] = oracle_llf_batch(cfg, b, batch_size);
    return out;
}

}  // namespace froc::kernels::serial
