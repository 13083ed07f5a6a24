#include "contagion/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "contagion/error.hpp"

namespace contagion {

ProfileEmbedding::ProfileEmbedding(std::vector<double> raw) : values_(std::move(raw)) {
  double norm = 0.0;
  for (double x : values_) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorKind::Degenerate, "profile embedding has zero or non-finite norm");
  for (double& x : values_) x /= norm;
}

namespace {

std::vector<std::string> vocabulary(const ProfileTable& profiles,
                                    std::string Profile::*field) {
  std::set<std::string> seen;
  for (const auto& [id, p] : profiles) seen.insert(p.*field);
  return {seen.begin(), seen.end()};
}

void one_hot(std::vector<double>& out, const std::vector<std::string>& vocab,
             const std::string& value) {
  const std::size_t base = out.size();
  out.resize(base + vocab.size(), 0.0);
  auto it = std::lower_bound(vocab.begin(), vocab.end(), value);
  if (it != vocab.end() && *it == value) out[base + static_cast<std::size_t>(it - vocab.begin())] = 1.0;
}

}  // namespace

ProfileEmbedder ProfileEmbedder::fit(const ProfileTable& profiles) {
  ProfileEmbedder e;
  e.genders_ = vocabulary(profiles, &Profile::gender);
  e.languages_ = vocabulary(profiles, &Profile::language);
  e.cities_ = vocabulary(profiles, &Profile::city);
  return e;
}

std::size_t ProfileEmbedder::dimension() const {
  return 2 + genders_.size() + languages_.size() + cities_.size();
}

ProfileEmbedding ProfileEmbedder::embed(const Profile& profile) const {
  validate(profile);
  std::vector<double> v;
  v.reserve(dimension());
  v.push_back((profile.age_years - 1) / 119.0);
  const double followers = std::log10(1.0 + static_cast<double>(profile.follower_count)) / 8.0;
  v.push_back(std::clamp(followers, 0.0, 1.0));
  one_hot(v, genders_, profile.gender);
  one_hot(v, languages_, profile.language);
  one_hot(v, cities_, profile.city);
  return ProfileEmbedding(std::move(v));
}

double profile_similarity(const ProfileEmbedding& a, const ProfileEmbedding& b) {
  if (a.dimension() != b.dimension())
    throw Error(ErrorKind::Shape, "profile embeddings have dimensions " +
                                      std::to_string(a.dimension()) + " and " +
                                      std::to_string(b.dimension()));
  double dot = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) dot += a.values()[i] * b.values()[i];
  return dot;
}

double content_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(ErrorKind::Shape, "correlation inputs differ in length");
  if (x.size() < 2) throw Error(ErrorKind::Shape, "correlation needs at least two samples");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw Error(ErrorKind::Degenerate, "correlation of a constant vector is undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void CorrelationConfig::validate() const {
  if (!(0.0 <= rho_clamp_min && rho_clamp_min < rho_clamp_max && rho_clamp_max < 1.0))
    throw Error(ErrorKind::Config, "correlation clamp must satisfy 0 <= min < max < 1");
  if (age_floor < 1) throw Error(ErrorKind::Config, "age floor must be at least 1");
}

SimilarityProviders::SimilarityProviders(ProfileTable profiles, EmbeddingStore content,
                                         std::map<UserId, std::vector<double>> overrides,
                                         CorrelationConfig config)
    : profiles_(std::move(profiles)), content_(std::move(content)), config_(config) {
  config_.validate();
  const auto embedder = ProfileEmbedder::fit(profiles_);
  for (const auto& [id, profile] : profiles_) embeddings_.emplace(id, embedder.embed(profile));
  for (auto& [id, vec] : overrides) embeddings_.insert_or_assign(id, ProfileEmbedding(std::move(vec)));
}

const ProfileEmbedding& SimilarityProviders::profile_embedding(const UserId& user) const {
  auto it = embeddings_.find(user);
  if (it == embeddings_.end())
    throw Error(ErrorKind::Lookup, "no profile for user '" + user + "'");
  return it->second;
}

const EmbeddingRecord& SimilarityProviders::content(const VideoId& video) const {
  const EmbeddingRecord* rec = content_.find(video);
  if (!rec) throw Error(ErrorKind::Lookup, "no embedding for video '" + video + "'");
  return *rec;
}

double delta_c(const VideoId& created, std::span<const WatchedVideo> watched,
               const SimilarityProviders& providers) {
  if (watched.empty()) throw Error(ErrorKind::Degenerate, "semantic score needs watched videos");
  const auto& cfg = providers.config();
  const EmbeddingRecord& made = providers.content(created);
  double total = 0.0;
  for (const auto& w : watched) {
    const EmbeddingRecord& seen = providers.content(w.video);
    const double rho_d = std::clamp(content_correlation(made.visual, seen.visual),
                                    cfg.rho_clamp_min, cfg.rho_clamp_max);
    const double rho_q = std::clamp(content_correlation(made.audio, seen.audio),
                                    cfg.rho_clamp_min, cfg.rho_clamp_max);
    const double age = std::max(w.age_days, cfg.age_floor);
    total += -age * std::log(1.0 - rho_d) - age * std::log(1.0 - rho_q);
  }
  return total / static_cast<double>(watched.size());
}

double delta_e(int created_sentiment, std::span<const int> watched_sentiments) {
  if (watched_sentiments.empty())
    throw Error(ErrorKind::Degenerate, "sentiment agreement needs watched videos");
  const auto agree = std::count(watched_sentiments.begin(), watched_sentiments.end(), created_sentiment);
  return 0.5 + 0.5 * static_cast<double>(agree) / static_cast<double>(watched_sentiments.size());
}

}  // namespace contagion
