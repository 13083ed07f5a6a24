#include "contagion/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include <json.hpp>

#include "contagion/error.hpp"

namespace contagion {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::array<const char*, 3> kGenders = {"female", "male", "other"};
constexpr std::array<double, 3> kGenderWeights = {0.45, 0.50, 0.05};
constexpr std::array<const char*, 8> kLanguages = {"hindi",   "tamil",   "telugu",  "bengali",
                                                   "marathi", "kannada", "gujarati", "punjabi"};
constexpr std::array<const char*, 12> kCities = {
    "delhi", "mumbai",  "chennai", "kolkata", "pune",    "jaipur",
    "patna", "lucknow", "indore",  "kochi",   "nagpur",  "surat"};

// Relative weights of the components of a video embedding.
constexpr double kTopicWeight = 1.0;
constexpr double kStyleWeight = 0.8;
constexpr double kNoiseWeight = 1.0;
// Share of a neighbor's videos that fall in its primary topic.
constexpr double kPrimaryTopicShare = 0.7;

std::string central_id(int c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "c%02d", c);
  return buf;
}

std::string neighbor_id(int c, int k) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "n%02d.%03d", c, k);
  return buf;
}

std::string topic_id(int s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "t%02d", s);
  return buf;
}

std::string video_id(int c, int k, int post_day) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "v%02d.%03d.%d", c, k, post_day);
  return buf;
}

std::string created_id(int c, int day) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "x%02d.%d", c, day);
  return buf;
}

double quantize(double x) { return std::round(x * 1e4) / 1e4; }

template <std::size_t N>
const char* pick(const std::array<const char*, N>& items, double u) {
  return items[std::min<std::size_t>(N - 1, static_cast<std::size_t>(u * N))];
}

const char* pick_gender(double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < kGenders.size(); ++i) {
    acc += kGenderWeights[i];
    if (u < acc) return kGenders[i];
  }
  return kGenders.back();
}

class Generator {
 public:
  explicit Generator(const SynthConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  SynthCorpus run() {
    SynthCorpus corpus;
    corpus.window = {0, cfg_.window_days()};
    for (int c = 0; c < cfg_.n_central; ++c) central(c, corpus);
    corpus.embeddings.reserve(videos_.size());
    for (auto& [id, rec] : videos_) corpus.embeddings.push_back(std::move(rec));
    return corpus;
  }

 private:
  // Latent per-user style vector shared by a user's videos.
  using Style = std::array<double, 2 * kSynthEmbeddingDim>;

  Style central_style(int c) const {
    Style s;
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = rng_.normal("style.central", c, static_cast<std::int64_t>(j));
    return s;
  }

  Style neighbor_style(int c, int k, const Style& centre) const {
    Style s;
    const bool core = k < cfg_.homophilic_core;
    const double h = core ? cfg_.homophily_level : 0.0;
    const double rest = std::sqrt(std::max(0.0, 1.0 - h * h));
    for (std::size_t j = 0; j < s.size(); ++j)
      s[j] = h * centre[j] + rest * rng_.normal("style.neighbor", c, k, static_cast<std::int64_t>(j));
    return s;
  }

  void add_video(const VideoId& id, int topic, const Style& style, std::int64_t owner_c,
                 std::int64_t owner_k, std::int64_t day) {
    if (videos_.contains(id)) return;
    EmbeddingRecord rec;
    rec.video = id;
    rec.visual.resize(kSynthEmbeddingDim);
    rec.audio.resize(kSynthEmbeddingDim);
    for (std::size_t j = 0; j < 2 * kSynthEmbeddingDim; ++j) {
      const auto jj = static_cast<std::int64_t>(j);
      const double value = kTopicWeight * rng_.normal("topic.centroid", topic, jj) +
                           kStyleWeight * style[j] +
                           kNoiseWeight * rng_.normal("video.noise", owner_c, owner_k, day, jj);
      (j < kSynthEmbeddingDim ? rec.visual[j] : rec.audio[j - kSynthEmbeddingDim]) = quantize(value);
    }
    rec.sentiment = rng_.uniform("sentiment", owner_c, owner_k, day) < cfg_.negative_fraction ? -1 : 1;
    videos_.emplace(id, std::move(rec));
  }

  Profile random_profile(const UserId& id, std::string_view stream, std::int64_t a, std::int64_t b) const {
    Profile p;
    p.user_id = id;
    p.age_years = 16 + static_cast<int>(rng_.below(45, stream, a, b, 0));
    p.gender = pick_gender(rng_.uniform(stream, a, b, 1));
    p.language = pick(kLanguages, rng_.uniform(stream, a, b, 2));
    p.city = pick(kCities, rng_.uniform(stream, a, b, 3));
    p.follower_count = static_cast<std::int64_t>(std::pow(10.0, 1.0 + 4.0 * rng_.uniform(stream, a, b, 4)));
    return p;
  }

  Profile neighbor_profile(const Profile& centre, int c, int k) const {
    Profile p = random_profile(neighbor_id(c, k), "profile.neighbor", c, k);
    if (k >= cfg_.homophilic_core) return p;
    const double h = cfg_.homophily_level;
    if (rng_.uniform("profile.copy", c, k, 0) < h) p.gender = centre.gender;
    if (rng_.uniform("profile.copy", c, k, 1) < h) p.language = centre.language;
    if (rng_.uniform("profile.copy", c, k, 2) < h) p.city = centre.city;
    const double jitter = (1.0 - h) * 12.0 * rng_.normal("profile.age", c, k);
    p.age_years = std::clamp(static_cast<int>(std::lround(centre.age_years + jitter)), 13, 80);
    return p;
  }

  int video_topic(int c, int k, int post_day) const {
    if (rng_.uniform("topic.mix", c, k, post_day) < kPrimaryTopicShare)
      return static_cast<int>(rng_.below(cfg_.topics, "topic.primary", c, k));
    return static_cast<int>(rng_.below(cfg_.topics, "topic.other", c, k, post_day));
  }

  double reaction_probability(double base, int sentiment) const {
    return std::min(1.0, sentiment < 0 ? base * cfg_.negative_engagement_boost : base);
  }

  void central(int c, SynthCorpus& corpus) {
    const UserId cid = central_id(c);
    corpus.centrals.push_back(cid);
    const Profile centre = random_profile(cid, "profile.central", c, 0);
    corpus.profiles.emplace(cid, centre);
    const Style centre_style = central_style(c);

    const double spread = 0.75 + 0.5 * rng_.uniform("neighbors.count", c);
    const int m = std::max(1, static_cast<int>(std::lround(cfg_.avg_neighbors * spread)));
    std::vector<Style> styles;
    styles.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      corpus.profiles.emplace(neighbor_id(c, k), neighbor_profile(centre, c, k));
      styles.push_back(neighbor_style(c, k, centre_style));
    }

    const int days = cfg_.window_days();
    const auto& rates = cfg_.engagement;

    // Follow timeline per neighbor.
    std::vector<std::vector<ActivityEvent>> follows(static_cast<std::size_t>(days));
    for (int k = 0; k < m; ++k) {
      if (rng_.uniform("follow", c, k) >= rates.follow) continue;
      const int fday = static_cast<int>(rng_.below(std::min(7, days), "follow.day", c, k));
      follows[static_cast<std::size_t>(fday)].push_back(
          {cid, ActionKind::Follow, std::nullopt, std::nullopt, neighbor_id(c, k), std::nullopt, fday});
      if (fday + 1 < days && rng_.uniform("unfollow", c, k) < rates.unfollow) {
        const int uday = fday + 1 + static_cast<int>(rng_.below(days - fday - 1, "unfollow.day", c, k));
        follows[static_cast<std::size_t>(uday)].push_back(
            {cid, ActionKind::Unfollow, std::nullopt, std::nullopt, neighbor_id(c, k), std::nullopt, uday});
      }
    }

    std::vector<double> topic_plays(static_cast<std::size_t>(cfg_.topics), 0.0);
    std::vector<std::vector<int>> neighbor_topic_plays(
        static_cast<std::size_t>(cfg_.topics), std::vector<int>(static_cast<std::size_t>(m), 0));
    double total_plays = 0.0;

    for (int d = 0; d < days; ++d) {
      for (auto& ev : follows[static_cast<std::size_t>(d)]) corpus.events.push_back(std::move(ev));

      const int plays = static_cast<int>(cfg_.plays_per_day * (0.5 + rng_.uniform("plays", c, d)));
      for (int j = 0; j < plays; ++j) {
        const int k = static_cast<int>(rng_.below(m, "pick", c, d, j));
        const int age = rng_.geometric(cfg_.reaction_latency_mean_days, "age", c, d, j);
        const int post_day = d - age;
        const int topic = video_topic(c, k, post_day);
        const VideoId vid = video_id(c, k, post_day);
        add_video(vid, topic, styles[static_cast<std::size_t>(k)], c, k, post_day);
        const int sentiment = videos_.at(vid).sentiment;
        const UserId creator = neighbor_id(c, k);
        auto emit = [&](ActionKind kind) {
          corpus.events.push_back({cid, kind, vid, topic_id(topic), creator, post_day, d});
        };
        emit(ActionKind::Play);
        topic_plays[static_cast<std::size_t>(topic)] += 1.0;
        neighbor_topic_plays[static_cast<std::size_t>(topic)][static_cast<std::size_t>(k)] += 1;
        total_plays += 1.0;
        if (rng_.uniform("react.like", c, d, j) < reaction_probability(rates.like, sentiment))
          emit(ActionKind::Like);
        if (rng_.uniform("react.share", c, d, j) < reaction_probability(rates.share, sentiment))
          emit(ActionKind::Share);
        if (rng_.uniform("react.download", c, d, j) < reaction_probability(rates.download, sentiment))
          emit(ActionKind::Download);
      }

      // Creation is driven by exposure: the more focused the viewing, the
      // more likely the user posts on its most-watched topic.
      if (total_plays == 0.0) continue;
      const auto top = std::max_element(topic_plays.begin(), topic_plays.end()) - topic_plays.begin();
      const double focus = topic_plays[static_cast<std::size_t>(top)] / total_plays;
      if (rng_.uniform("create", c, d) >= rates.create * focus) continue;
      const auto& per_neighbor = neighbor_topic_plays[static_cast<std::size_t>(top)];
      const auto k = static_cast<int>(std::max_element(per_neighbor.begin(), per_neighbor.end()) -
                                      per_neighbor.begin());
      const VideoId vid = created_id(c, d);
      add_video(vid, static_cast<int>(top), centre_style, c, -1, d);
      corpus.events.push_back(
          {cid, ActionKind::Create, vid, topic_id(static_cast<int>(top)), neighbor_id(c, k), d, d});
    }
  }

  const SynthConfig& cfg_;
  KeyedRandom rng_;
  std::map<VideoId, EmbeddingRecord> videos_;
};

}  // namespace

std::uint64_t KeyedRandom::bits(std::string_view stream, std::int64_t a, std::int64_t b,
                                std::int64_t c, std::int64_t d) const {
  std::uint64_t h = splitmix(seed_ ^ fnv1a(stream));
  for (std::int64_t v : {a, b, c, d}) h = splitmix(h ^ static_cast<std::uint64_t>(v));
  return h;
}

double KeyedRandom::uniform(std::string_view stream, std::int64_t a, std::int64_t b,
                            std::int64_t c, std::int64_t d) const {
  return static_cast<double>(bits(stream, a, b, c, d) >> 11) * 0x1.0p-53;
}

double KeyedRandom::normal(std::string_view stream, std::int64_t a, std::int64_t b,
                           std::int64_t c, std::int64_t d) const {
  const std::uint64_t h = bits(stream, a, b, c, d);
  const double u1 = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(splitmix(h) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t KeyedRandom::below(std::int64_t n, std::string_view stream, std::int64_t a,
                                std::int64_t b, std::int64_t c, std::int64_t d) const {
  if (n <= 0) throw Error(ErrorKind::Parameter, "empty range");
  return std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(uniform(stream, a, b, c, d) * static_cast<double>(n)));
}

int KeyedRandom::geometric(double mean, std::string_view stream, std::int64_t a, std::int64_t b,
                           std::int64_t c, std::int64_t d) const {
  if (mean <= 0.0) return 0;
  const double q = mean / (1.0 + mean);  // failure probability
  const double u = 1.0 - uniform(stream, a, b, c, d);  // (0, 1]
  return static_cast<int>(std::floor(std::log(u) / std::log(q)));
}

void SynthConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(ErrorKind::Config, std::string(name) + " must lie in [0, 1]");
  };
  if (n_central < 1) throw Error(ErrorKind::Config, "n_central must be at least 1");
  if (avg_neighbors < 1) throw Error(ErrorKind::Config, "avg_neighbors must be at least 1");
  if (weeks < 1) throw Error(ErrorKind::Config, "weeks must be at least 1");
  if (topics < 1) throw Error(ErrorKind::Config, "topics must be at least 1");
  if (plays_per_day < 0) throw Error(ErrorKind::Config, "plays_per_day must be nonnegative");
  if (homophilic_core < 0) throw Error(ErrorKind::Config, "homophilic_core must be nonnegative");
  if (!(reaction_latency_mean_days >= 0.0))
    throw Error(ErrorKind::Config, "reaction latency mean must be nonnegative");
  if (!(negative_engagement_boost >= 0.0))
    throw Error(ErrorKind::Config, "negative engagement boost must be nonnegative");
  prob(negative_fraction, "negative_fraction");
  prob(homophily_level, "homophily_level");
  prob(engagement.like, "like rate");
  prob(engagement.share, "share rate");
  prob(engagement.download, "download rate");
  prob(engagement.follow, "follow rate");
  prob(engagement.unfollow, "unfollow rate");
  prob(engagement.create, "create rate");
}

SynthCorpus generate(const SynthConfig& config) {
  config.validate();
  return Generator(config).run();
}

void write_events(std::ostream& out, std::span<const ActivityEvent> events) {
  for (const auto& ev : events) {
    nlohmann::ordered_json j;
    j["actor"] = ev.actor;
    j["action"] = std::string(to_string(ev.action));
    if (ev.video) j["video"] = *ev.video;
    if (ev.topic) j["topic"] = *ev.topic;
    j["creator"] = ev.creator;
    if (ev.post_day) j["post_day"] = *ev.post_day;
    j["day"] = ev.event_day;
    out << j.dump() << '\n';
  }
}

void write_profiles(std::ostream& out, const ProfileTable& profiles) {
  for (const auto& [id, p] : profiles) {
    nlohmann::ordered_json j;
    j["user"] = p.user_id;
    j["age"] = p.age_years;
    j["gender"] = p.gender;
    j["language"] = p.language;
    j["city"] = p.city;
    j["followers"] = p.follower_count;
    out << j.dump() << '\n';
  }
}

void write_embeddings(std::ostream& out, std::span<const EmbeddingRecord> embeddings) {
  for (const auto& rec : embeddings) {
    nlohmann::ordered_json j;
    j["video"] = rec.video;
    j["visual"] = rec.visual;
    j["audio"] = rec.audio;
    j["sentiment"] = rec.sentiment;
    out << j.dump() << '\n';
  }
}

}  // namespace contagion
