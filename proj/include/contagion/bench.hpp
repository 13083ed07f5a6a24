#pragma once

// Cost of global versus localized diffusion: an analytical model calibrated
// on a reference workload, and a measured benchmark of the local estimator.

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "contagion/ingest.hpp"

namespace contagion {

// Global diffusion over n = C*M user pairs costs compute_unit * n^2 seconds
// and storage_unit * n^3 bytes; localized diffusion costs one unit per pair.
struct CostUnits {
  double compute_seconds = 1.0;
  double storage_bytes = 1.0;
};

struct CostEstimate {
  double pairs = 0.0;  // C * M
  double global_compute_seconds = 0.0;
  double global_storage_bytes = 0.0;
  double local_compute_seconds = 0.0;
  double local_storage_bytes = 0.0;
  // global / local compute; equals C * M under the model.
  double reduction_factor = 0.0;
  double storage_reduction_factor = 0.0;
};

// Units that make cost_model(C, M) reproduce the given global costs.
CostUnits calibrate_units(double central_users, double avg_neighbors, double storage_bytes,
                          double compute_seconds);

// Calibration on 50 central users with 1,461 neighbors each requiring
// 14.60 TB and 4.22 days globally.
CostUnits reference_units();

// Throws Error(Range) unless C, M >= 1.
CostEstimate cost_model(double central_users, double avg_neighbors, const CostUnits& units);

struct BenchInputs {
  std::filesystem::path events;
  std::filesystem::path profiles;
  std::filesystem::path embeddings;
  ParseOptions options;
};

struct PhaseSample {
  std::string phase;  // parse, extract, estimate
  int repetition = 0;
  double wall_ms = 0.0;
  std::int64_t peak_mem_bytes = 0;
};

struct BenchReport {
  unsigned workers = 1;
  std::size_t events = 0;
  std::size_t central_users = 0;
  std::size_t edges = 0;
  std::vector<PhaseSample> samples;
  std::map<std::string, double> median_wall_ms;
  std::int64_t peak_mem_bytes = 0;
};

BenchReport run_local_bench(const BenchInputs& inputs, int repetitions, unsigned workers = 1);

// CSV `phase,repetition,wall_ms,peak_mem_bytes`.
void write_bench_csv(std::ostream& out, const BenchReport& report);

// Peak resident set size of this process so far, 0 when unavailable.
std::int64_t peak_rss_bytes();
// Restarts peak-RSS tracking where the kernel supports it.
void reset_peak_rss();

}  // namespace contagion
