#include "froc/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>

namespace froc::kernels::omp {

namespace {

int team_size(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

// Fills out[i] = body(i); the first exception is rethrown after the loop.
template <typename T, typename Body>
void indexed_map(std::vector<T>& out, int threads, Body&& body) {
    const long n = static_cast<long>(out.size());
    std::exception_ptr first;
#pragma omp parallel for schedule(dynamic, 1) num_threads(team_size(threads))
    for (long i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = body(i);
        } catch (...) {
#pragma omp critical(froc_kernel_error)
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
}

}  // namespace

std::vector<double> bootstrap_aucs(const AucInputs& inputs, int replicates, std::uint64_t seed, int threads) {
    std::vector<double> out(static_cast<std::size_t>(replicates));
    indexed_map(out, threads,
                [&](long b) { return bootstrap_replicate_auc(inputs, seed, static_cast<std::uint64_t>(b)); });
    return out;
}

std::vector<std::vector<CellOutcome>> coverage_replicates(const CoverageTask& task, int threads) {
    std::vector<std::vector<CellOutcome>> out(static_cast<std::size_t>(task.config.replications));
    indexed_map(out, threads, [&](long r) { return run_replicate(task, r); });
    return out;
}

MomentSums oracle_auc(const SimConfig& cfg, long draws, int threads) {
    const long chunks = (draws + kOracleChunk - 1) / kOracleChunk;
    std::vector<MomentSums> parts(static_cast<std::size_t>(chunks));
    indexed_map(parts, threads,
                [&](long c) { return oracle_auc_chunk(cfg, c, std::min(kOracleChunk, draws - c * kOracleChunk)); });
    // Chunk-ordered reduction keeps the floating-point sum independent of scheduling.
    MomentSums total;
    for (const auto& p : parts) total.add(p);
    return total;
}

std::vector<double> oracle_llf(const SimConfig& cfg, long batches, long batch_size, int threads) {
    std::vector<double> out(static_cast<std::size_t>(batches));
    indexed_map(out, threads, [&](long b) { return oracle_llf_batch(cfg, b, batch_size); });
    return out;
}

}  // namespace froc::kernels::omp
