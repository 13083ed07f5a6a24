#pragma once

// Homophily and content-similarity factors: profile embeddings and their dot
// product, Pearson content correlation, the log-scaled semantic score and
// sentiment agreement.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "contagion/ingest.hpp"
#include "contagion/model.hpp"

namespace contagion {

// Unit-norm profile vector.
class ProfileEmbedding {
 public:
  ProfileEmbedding() = default;
  // Normalizes; throws Error(Degenerate) for a zero or non-finite vector.
  explicit ProfileEmbedding(std::vector<double> raw);

  std::span<const double> values() const { return values_; }
  std::size_t dimension() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

// Transparent feature embedding: min-max scaled age over [1,120] and
// log10(1+followers) over [0,8], followed by one-hot gender, language and
// city blocks, L2-normalized. Category vocabularies are fixed at fit time so
// every embedding of one embedder shares the same layout.
class ProfileEmbedder {
 public:
  static ProfileEmbedder fit(const ProfileTable& profiles);

  ProfileEmbedding embed(const Profile& profile) const;
  std::size_t dimension() const;

 private:
  std::vector<std::string> genders_;
  std::vector<std::string> languages_;
  std::vector<std::string> cities_;
};

// a . b; throws Error(Shape) on a dimension mismatch.
double profile_similarity(const ProfileEmbedding& a, const ProfileEmbedding& b);

// Pearson correlation of two equal-length vectors (length >= 2). Throws
// Error(Shape) for mismatched or too-short inputs and Error(Degenerate) when
// either vector is constant.
double content_correlation(std::span<const double> x, std::span<const double> y);

struct CorrelationConfig {
  double rho_clamp_min = 0.0;
  double rho_clamp_max = 1.0 - 1e-6;
  int age_floor = 1;

  void validate() const;
};

struct WatchedVideo {
  VideoId video;
  int age_days = 0;
};

// Read-only lookups behind the similarity factors. Profile embeddings for
// every user in the profile table are computed once at construction.
class SimilarityProviders {
 public:
  SimilarityProviders(ProfileTable profiles, EmbeddingStore content,
                      std::map<UserId, std::vector<double>> overrides = {},
                      CorrelationConfig config = {});

  // Throws Error(Lookup) when the user has neither a profile nor an override.
  const ProfileEmbedding& profile_embedding(const UserId& user) const;
  // Throws Error(Lookup) for an unknown video.
  const EmbeddingRecord& content(const VideoId& video) const;

  const CorrelationConfig& config() const { return config_; }
  const ProfileTable& profiles() const { return profiles_; }
  const EmbeddingStore& content_store() const { return content_; }

 private:
  ProfileTable profiles_;
  EmbeddingStore content_;
  CorrelationConfig config_;
  std::map<UserId, ProfileEmbedding> embeddings_;
};

// Mean over watched videos v of -a*log(1-rho_D) - a*log(1-rho_Q), where the
// correlations are clamped into [rho_clamp_min, rho_clamp_max] and
// a = max(age, age_floor). Throws Error(Degenerate) for an empty list.
double delta_c(const VideoId& created, std::span<const WatchedVideo> watched,
               const SimilarityProviders& providers);

// 1/2 + (fraction of watched sentiments equal to the created one) / 2.
double delta_e(int created_sentiment, std::span<const int> watched_sentiments);

}  // namespace contagion
