#pragma once

// Replicate loops. Every loop body owns an RNG stream keyed by its index, so
// the serial and OpenMP versions produce identical results for any thread
// count. The serial versions are the reference the tests compare against.

#include <cstdint>
#include <vector>

#include "froc/empirical.hpp"
#include "froc/simulator.hpp"

namespace froc::kernels {

namespace serial {

std::vector<double> bootstrap_aucs(const AucInputs& inputs, int replicates, std::uint64_t seed);
std::vector<std::vector<CellOutcome>> coverage_replicates(const CoverageTask& task);
MomentSums oracle_auc(const SimConfig& cfg, long draws);
std::vector<double> oracle_llf(const SimConfig& cfg, long batches, long batch_size);

}  // namespace serial

namespace omp {

// threads = 0 keeps the OpenMP default team size.
std::vector<double> bootstrap_aucs(const AucInputs& inputs, int replicates, std::uint64_t seed, int threads = 0);
std::vector<std::vector<CellOutcome>> coverage_replicates(const CoverageTask& task, int threads = 0);
MomentSums oracle_auc(const SimConfig& cfg, long draws, int threads = 0);
std::vector<double> oracle_llf(const SimConfig& cfg, long batches, long batch_size, int threads = 0);

}  // namespace omp

}  // namespace froc::kernels
