#pragma once

// Seeded synthetic social-activity corpora in the three ingest formats.

#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "contagion/ingest.hpp"
#include "contagion/model.hpp"

namespace contagion {

struct EngagementRates {
  double like = 0.25;
  double share = 0.06;
  double download = 0.06;
  double follow = 0.6;    // per neighbor, within the first week
  double unfollow = 0.1;  // per followed neighbor, later in the window
  double create = 0.5;    // daily creation rate, scaled by topic focus
};

struct SynthConfig {
  int n_central = 48;
  int avg_neighbors = 24;
  int weeks = 8;
  int topics = 8;
  double negative_fraction = 0.3;
  double homophily_level = 0.5;
  double reaction_latency_mean_days = 1.0;
  EngagementRates engagement;
  std::uint64_t seed = 0;

  // Mean number of plays per central user per day.
  int plays_per_day = 30;
  // The first homophilic_core neighbors of every central user are drawn
  // similar to it (controlled by homophily_level); the rest are unrelated.
  int homophilic_core = 8;
  // Reaction probabilities on negative videos are multiplied by this.
  double negative_engagement_boost = 1.5;

  int window_days() const { return 7 * weeks; }
  void validate() const;
};

inline constexpr std::size_t kSynthEmbeddingDim = 64;

struct SynthCorpus {
  std::vector<UserId> centrals;
  std::vector<ActivityEvent> events;  // chronological per central user
  ProfileTable profiles;
  std::vector<EmbeddingRecord> embeddings;  // sorted by video id
  Window window;
};

SynthCorpus generate(const SynthConfig& config);

// Serializers for the ingest formats; outputs are byte-deterministic.
void write_events(std::ostream& out, std::span<const ActivityEvent> events);
void write_profiles(std::ostream& out, const ProfileTable& profiles);
void write_embeddings(std::ostream& out, std::span<const EmbeddingRecord> embeddings);

// Counter-based random source: every draw is a pure function of the seed, a
// named stream and integer coordinates, so changing one part of the
// configuration leaves draws keyed elsewhere untouched.
class KeyedRandom {
 public:
  explicit KeyedRandom(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::string_view stream, std::int64_t a = 0, std::int64_t b = 0,
                     std::int64_t c = 0, std::int64_t d = 0) const;
  // Uniform in [0, 1).
  double uniform(std::string_view stream, std::int64_t a = 0, std::int64_t b = 0,
                 std::int64_t c = 0, std::int64_t d = 0) const;
  double normal(std::string_view stream, std::int64_t a = 0, std::int64_t b = 0,
                std::int64_t c = 0, std::int64_t d = 0) const;
  // Uniform integer in [0, n).
  std::int64_t below(std::int64_t n, std::string_view stream, std::int64_t a = 0,
                     std::int64_t b = 0, std::int64_t c = 0, std::int64_t d = 0) const;
  // Geometric on {0, 1, ...} with the given mean.
  int geometric(double mean, std::string_view stream, std::int64_t a = 0, std::int64_t b = 0,
                std::int64_t c = 0, std::int64_t d = 0) const;

 private:
  std::uint64_t seed_;
};

}  // namespace contagion
