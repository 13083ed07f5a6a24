#pragma once

// Small builders shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "contagion/diffusion.hpp"
#include "contagion/ingest.hpp"
#include "contagion/model.hpp"
#include "contagion/similarity.hpp"

namespace testing_support {

using namespace contagion;

inline ActivityEvent play(const UserId& actor, const UserId& creator, const VideoId& video,
                          const TopicId& topic, int post_day, int day) {
  return {actor, ActionKind::Play, video, topic, creator, post_day, day};
}

inline ActivityEvent react(ActionKind kind, const UserId& actor, const UserId& creator,
                           const VideoId& video, const TopicId& topic, int post_day, int day) {
  return {actor, kind, video, topic, creator, post_day, day};
}

inline ActivityEvent follow(const UserId& actor, const UserId& target, int day) {
  return {actor, ActionKind::Follow, std::nullopt, std::nullopt, target, std::nullopt, day};
}

inline ActivityEvent unfollow(const UserId& actor, const UserId& target, int day) {
  return {actor, ActionKind::Unfollow, std::nullopt, std::nullopt, target, std::nullopt, day};
}

// Providers backed only by explicit profile vectors and content records.
inline SimilarityProviders providers_with(std::map<UserId, std::vector<double>> profiles,
                                          const std::vector<EmbeddingRecord>& content = {}) {
  EmbeddingStore store;
  for (const auto& rec : content) store.insert(rec);
  return SimilarityProviders({}, std::move(store), std::move(profiles));
}

// Three-component vector with Pearson correlation exactly r against
// basis_x() (up to rounding): both directions are centered and orthogonal.
inline std::vector<double> basis_x() { return {1.0, -1.0, 0.0}; }

inline std::vector<double> correlated_with_x(double r) {
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  const double a = r / std::sqrt(2.0);
  const double b = s / std::sqrt(6.0);
  return {a + b, -a + b, -2.0 * b};
}

inline EmbeddingRecord content_record(const VideoId& id, std::vector<double> v, int sentiment = 1) {
  return {id, v, v, sentiment};
}

inline HistoryMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, int cols,
                                   double sparsity = 0.5) {
  std::vector<TopicId> topics;
  for (std::size_t i = 0; i < rows; ++i) topics.push_back("t" + std::to_string(i));
  HistoryMatrix m(topics, cols);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t s = 0; s < rows; ++s)
    for (int d = 0; d < cols; ++d)
      if (u(rng) >= sparsity) m.set(s, static_cast<std::size_t>(d), 100.0 * u(rng));
  return m;
}

// Tr(sqrt(A)^T sqrt(A)) by explicit matrix product.
inline double brute_trace(const HistoryMatrix& a) {
  const std::size_t r = a.rows(), c = a.cols();
  double tr = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    double diag = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      const double x = std::sqrt(a.at(i, j));
      diag += x * x;
    }
    tr += diag;
  }
  return tr;
}

// Random star: central "c", neighbors "n0".."n{m-1}", profile vectors with
// nonnegative entries, plays and engagements without Create.
struct RandomStar {
  std::vector<ActivityEvent> events;
  std::map<UserId, std::vector<double>> profiles;
  std::vector<TopicId> topics;
  Window window;
};

inline RandomStar random_star(std::mt19937_64& rng, int neighbors, int topics, int days,
                              int events_per_edge) {
  RandomStar s;
  s.window = {0, days};
  for (int t = 0; t < topics; ++t) s.topics.push_back("t" + std::to_string(t));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  s.profiles["c"] = {u(rng) + 0.1, u(rng), u(rng)};
  for (int n = 0; n < neighbors; ++n) {
    const UserId nb = "n" + std::to_string(n);
    s.profiles[nb] = {u(rng), u(rng) + 0.1, u(rng)};
    if (u(rng) < 0.5) s.events.push_back(follow("c", nb, static_cast<int>(rng() % days)));
    for (int e = 0; e < events_per_edge; ++e) {
      const int day = static_cast<int>(rng() % days);
      const int post = day - static_cast<int>(rng() % 4);
      const auto topic = s.topics[rng() % s.topics.size()];
      const VideoId vid = nb + ".v" + std::to_string(e);
      s.events.push_back(play("c", nb, vid, topic, post, day));
      if (u(rng) < 0.4) {
        const ActionKind kinds[] = {ActionKind::Like, ActionKind::Share, ActionKind::Download};
        s.events.push_back(react(kinds[rng() % 3], "c", nb, vid, topic, post, day));
      }
    }
  }
  return s;
}

}  // namespace testing_support
