#pragma once

// Paired synthetic experiments: baseline and variant corpora that differ in
// one generator axis, compared by relative contagion kappa = O / I.

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contagion/synth.hpp"

namespace contagion {

enum class Preset {
  NegativeSentiment,
  MoreNeighbors,
  HomophilicNeighbors,
  TopicDiversity,
};

inline constexpr std::array<Preset, 4> kAllPresets = {
    Preset::NegativeSentiment, Preset::MoreNeighbors, Preset::HomophilicNeighbors,
    Preset::TopicDiversity};

std::string_view to_string(Preset preset);
std::optional<Preset> parse_preset(std::string_view text);

// The variant configuration of a preset:
//   negative_sentiment   negative_fraction + 0.4 (capped at 1)
//   more_neighbors       avg_neighbors x 2
//   homophilic_neighbors homophily_level + 0.4 (capped at 1)
//   topic_diversity      topics x 2
SynthConfig apply_preset(Preset preset, const SynthConfig& base);

enum class Direction { Increase, Decrease, Unchanged };
std::string_view to_string(Direction direction);

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  double baseline_kappa = 0.0;
  double variant_kappa = 0.0;
  double baseline_xi = 0.0;  // mean total xi per central user
  double variant_xi = 0.0;
  double pct_change = 0.0;
};

struct ScenarioResult {
  std::string preset;
  double baseline_metric = 0.0;  // kappa averaged over central users and trials
  double variant_metric = 0.0;
  double pct_change = 0.0;
  Direction direction = Direction::Unchanged;
  double baseline_xi = 0.0;
  double variant_xi = 0.0;
  std::vector<TrialResult> trials;
};

struct CorpusMetrics {
  double kappa = 0.0;    // mean over central users with nonzero inflow
  double mean_xi = 0.0;  // mean total xi over the same users
  std::size_t users = 0;
};

// Runs the estimator over every central user of an in-memory corpus.
// Throws Error(Degenerate) when no central user has any inflow.
CorpusMetrics evaluate_corpus(const SynthCorpus& corpus, unsigned workers = 1);

// Seed of trial t, shared by the baseline and variant corpora.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial);

ScenarioResult run_paired(std::string name, const SynthConfig& baseline,
                          const SynthConfig& variant, int n_trials, unsigned workers = 1);

ScenarioResult run_scenario(Preset preset, const SynthConfig& base, int n_trials,
                            unsigned workers = 1);

// All presets at once; each trial's baseline corpus is evaluated once and
// shared. Results are identical to calling run_scenario per preset.
std::vector<ScenarioResult> run_scenarios(std::span<const Preset> presets, const SynthConfig& base,
                                          int n_trials, unsigned workers = 1);

// CSV `preset,trial,baseline_kappa,variant_kappa,pct_change`.
void write_scenario_csv(std::ostream& out, std::span<const ScenarioResult> results,
                        bool header = true);

}  // namespace contagion
