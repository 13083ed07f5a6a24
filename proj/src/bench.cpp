#include "contagion/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "contagion/diffusion.hpp"
#include "contagion/error.hpp"
#include "contagion/parallel.hpp"
#include "contagion/similarity.hpp"

namespace contagion {

namespace {

constexpr double kReferenceCentralUsers = 50.0;
constexpr double kReferenceNeighbors = 1461.0;
constexpr double kReferenceStorageBytes = 14.60e12;
constexpr double kReferenceComputeSeconds = 4.22 * 86400.0;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + path.string());
  return in;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

}  // namespace

CostUnits calibrate_units(double central_users, double avg_neighbors, double storage_bytes,
                          double compute_seconds) {
  if (!(central_users >= 1.0 && avg_neighbors >= 1.0))
    throw Error(ErrorKind::Range, "calibration needs C, M >= 1");
  const double n = central_users * avg_neighbors;
  return {compute_seconds / (n * n), storage_bytes / (n * n * n)};
}

CostUnits reference_units() {
  return calibrate_units(kReferenceCentralUsers, kReferenceNeighbors, kReferenceStorageBytes,
                         kReferenceComputeSeconds);
}

CostEstimate cost_model(double central_users, double avg_neighbors, const CostUnits& units) {
  if (!(central_users >= 1.0 && avg_neighbors >= 1.0))
    throw Error(ErrorKind::Range, "cost model needs C, M >= 1");
  CostEstimate e;
  e.pairs = central_users * avg_neighbors;
  e.global_compute_seconds = units.compute_seconds * e.pairs * e.pairs;
  e.global_storage_bytes = units.storage_bytes * e.pairs * e.pairs * e.pairs;
  e.local_compute_seconds = units.compute_seconds * e.pairs;
  e.local_storage_bytes = units.storage_bytes * e.pairs;
  e.reduction_factor = e.global_compute_seconds / e.local_compute_seconds;
  e.storage_reduction_factor = e.global_storage_bytes / e.local_storage_bytes;
  return e;
}

std::int64_t peak_rss_bytes() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream fields(line.substr(6));
      std::int64_t kb = 0;
      fields >> kb;
      return kb * 1024;
    }
  }
  return 0;
}

void reset_peak_rss() {
  std::ofstream clear("/proc/self/clear_refs");
  if (clear) clear << "5";
}

BenchReport run_local_bench(const BenchInputs& inputs, int repetitions, unsigned workers) {
  if (repetitions < 1) throw Error(ErrorKind::Config, "repetitions must be at least 1");
  BenchReport report;
  report.workers = std::max(1u, workers);
  using clock = std::chrono::steady_clock;
  std::map<std::string, std::vector<double>> walls;

  auto timed = [&](const char* phase, int rep, auto&& body) {
    reset_peak_rss();
    const auto start = clock::now();
    body();
    const std::chrono::duration<double, std::milli> wall = clock::now() - start;
    const auto peak = peak_rss_bytes();
    report.samples.push_back({phase, rep, wall.count(), peak});
    report.peak_mem_bytes = std::max(report.peak_mem_bytes, peak);
    walls[phase].push_back(wall.count());
  };

  for (int rep = 0; rep < repetitions; ++rep) {
    EventLog log;
    ProfileTable profiles;
    EmbeddingStore store;
    timed("parse", rep, [&] {
      auto events_in = open_input(inputs.events);
      log = parse_event_log(events_in, inputs.options);
      auto profiles_in = open_input(inputs.profiles);
      profiles = parse_profiles(profiles_in, inputs.options);
      auto embeddings_in = open_input(inputs.embeddings);
      store = parse_embeddings(embeddings_in, inputs.options);
    });

    std::vector<StarGraph> stars;
    const auto centrals = actors(log);
    timed("extract", rep, [&] { stars = extract_star_graphs(log, centrals); });

    const SimilarityProviders providers(std::move(profiles), std::move(store));
    std::vector<ContagionReport> reports(stars.size());
    timed("estimate", rep, [&] {
      parallel_for(stars.size(), report.workers,
                   [&](std::size_t i) { reports[i] = estimate_central_user(stars[i], providers); });
    });

    report.events = log.events.size();
    report.central_users = stars.size();
    report.edges = 0;
    for (const auto& s : stars) report.edges += s.edges.size();
  }
  for (auto& [phase, xs] : walls) report.median_wall_ms[phase] = median(xs);
  return report;
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
  out << "phase,repetition,wall_ms,peak_mem_bytes\n";
  for (const auto& s : report.samples)
    out << s.phase << ',' << s.repetition << ',' << format_double(s.wall_ms) << ','
        << s.peak_mem_bytes << '\n';
}

}  // namespace contagion
