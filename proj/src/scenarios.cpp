#include "contagion/scenarios.hpp"

#include <algorithm>

#include "contagion/diffusion.hpp"
#include "contagion/error.hpp"
#include "contagion/ingest.hpp"
#include "contagion/parallel.hpp"
#include "contagion/similarity.hpp"

namespace contagion {

std::string_view to_string(Preset preset) {
  switch (preset) {
    case Preset::NegativeSentiment: return "negative_sentiment";
    case Preset::MoreNeighbors: return "more_neighbors";
    case Preset::HomophilicNeighbors: return "homophilic_neighbors";
    case Preset::TopicDiversity: return "topic_diversity";
  }
  return "?";
}

std::optional<Preset> parse_preset(std::string_view text) {
  for (Preset p : kAllPresets)
    if (to_string(p) == text) return p;
  return std::nullopt;
}

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::Increase: return "increase";
    case Direction::Decrease: return "decrease";
    case Direction::Unchanged: return "unchanged";
  }
  return "?";
}

SynthConfig apply_preset(Preset preset, const SynthConfig& base) {
  SynthConfig v = base;
  switch (preset) {
    case Preset::NegativeSentiment:
      v.negative_fraction = std::min(1.0, base.negative_fraction + 0.4);
      break;
    case Preset::MoreNeighbors:
      v.avg_neighbors = 2 * base.avg_neighbors;
      break;
    case Preset::HomophilicNeighbors:
      v.homophily_level = std::min(1.0, base.homophily_level + 0.4);
      break;
    case Preset::TopicDiversity:
      v.topics = 2 * base.topics;
      break;
  }
  return v;
}

CorpusMetrics evaluate_corpus(const SynthCorpus& corpus, unsigned workers) {
  const EventLog log = make_event_log(corpus.events, corpus.window);
  const auto stars = extract_star_graphs(log, corpus.centrals);
  EmbeddingStore store;
  for (const auto& rec : corpus.embeddings) store.insert(rec);
  const SimilarityProviders providers(corpus.profiles, std::move(store));

  std::vector<ContagionReport> reports(stars.size());
  parallel_for(stars.size(), workers,
               [&](std::size_t i) { reports[i] = estimate_central_user(stars[i], providers); });

  CorpusMetrics m;
  for (const auto& r : reports) {
    if (r.total_inflow <= 0.0) continue;
    m.kappa += r.total_outflow / r.total_inflow;
    m.mean_xi += r.total_xi;
    ++m.users;
  }
  if (m.users == 0) throw Error(ErrorKind::Degenerate, "no central user has any inflow");
  m.kappa /= static_cast<double>(m.users);
  m.mean_xi /= static_cast<double>(m.users);
  return m;
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial) {
  return base_seed * 1000003ULL + static_cast<std::uint64_t>(trial);
}

namespace {

double percent_change(double baseline, double variant) {
  if (!(baseline > 0.0)) throw Error(ErrorKind::Degenerate, "baseline contagion is zero");
  return 100.0 * (variant - baseline) / baseline;
}

}  // namespace

namespace {

// Trial t evaluates the baseline once and every variant against it, all on
// trial_seed(baseline.seed, t).
std::vector<ScenarioResult> run_trials(std::vector<std::string> names, const SynthConfig& baseline,
                                       const std::vector<SynthConfig>& variants, int n_trials,
                                       unsigned workers) {
  if (n_trials < 1) throw Error(ErrorKind::Config, "n_trials must be at least 1");
  baseline.validate();
  for (const auto& v : variants) v.validate();
  std::vector<ScenarioResult> results(variants.size());
  for (std::size_t i = 0; i < variants.size(); ++i) results[i].preset = std::move(names[i]);

  for (int t = 0; t < n_trials; ++t) {
    const std::uint64_t seed = trial_seed(baseline.seed, t);
    SynthConfig b = baseline;
    b.seed = seed;
    const auto mb = evaluate_corpus(generate(b), workers);
    for (std::size_t i = 0; i < variants.size(); ++i) {
      SynthConfig v = variants[i];
      v.seed = seed;
      const auto mv = evaluate_corpus(generate(v), workers);
      TrialResult trial;
      trial.trial = t;
      trial.seed = seed;
      trial.baseline_kappa = mb.kappa;
      trial.variant_kappa = mv.kappa;
      trial.baseline_xi = mb.mean_xi;
      trial.variant_xi = mv.mean_xi;
      trial.pct_change = percent_change(mb.kappa, mv.kappa);
      results[i].trials.push_back(trial);
    }
  }

  const auto n = static_cast<double>(n_trials);
  for (auto& r : results) {
    for (const auto& t : r.trials) {
      r.baseline_metric += t.baseline_kappa;
      r.variant_metric += t.variant_kappa;
      r.baseline_xi += t.baseline_xi;
      r.variant_xi += t.variant_xi;
    }
    r.baseline_metric /= n;
    r.variant_metric /= n;
    r.baseline_xi /= n;
    r.variant_xi /= n;
    r.pct_change = percent_change(r.baseline_metric, r.variant_metric);
    r.direction = r.pct_change > 0.0   ? Direction::Increase
                  : r.pct_change < 0.0 ? Direction::Decrease
                                       : Direction::Unchanged;
  }
  return results;
}

}  // namespace

ScenarioResult run_paired(std::string name, const SynthConfig& baseline, const SynthConfig& variant,
                          int n_trials, unsigned workers) {
  return run_trials({std::move(name)}, baseline, {variant}, n_trials, workers).front();
}

ScenarioResult run_scenario(Preset preset, const SynthConfig& base, int n_trials, unsigned workers) {
  return run_paired(std::string(to_string(preset)), base, apply_preset(preset, base), n_trials,
                    workers);
}

std::vector<ScenarioResult> run_scenarios(std::span<const Preset> presets, const SynthConfig& base,
                                          int n_trials, unsigned workers) {
  std::vector<std::string> names;
  std::vector<SynthConfig> variants;
  for (Preset p : presets) {
    names.emplace_back(to_string(p));
    variants.push_back(apply_preset(p, base));
  }
  return run_trials(std::move(names), base, variants, n_trials, workers);
}

void write_scenario_csv(std::ostream& out, std::span<const ScenarioResult> results, bool header) {
  if (header) out << "preset,trial,baseline_kappa,variant_kappa,pct_change\n";
  for (const auto& r : results) {
    for (const auto& t : r.trials)
      out << r.preset << ',' << t.trial << ',' << format_double(t.baseline_kappa) << ','
          << format_double(t.variant_kappa) << ',' << format_double(t.pct_change) << '\n';
    out << r.preset << ",*," << format_double(r.baseline_metric) << ','
        << format_double(r.variant_metric) << ',' << format_double(r.pct_change) << '\n';
  }
}

}  // namespace contagion
