#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "contagion/model.hpp"

namespace contagion {

struct ParseOptions {
  // Skip invalid records instead of failing on the first one.
  bool lenient = false;
  // Day fields hold ISO-8601 date-times instead of integer day indices.
  bool timestamps = false;
  // Origin of day 0 in timestamp mode; defaults to the UTC date of the
  // earliest event.
  std::optional<Date> window_start;
  int window_days = 56;
};

struct ParseStats {
  std::size_t lines = 0;  // non-blank lines seen
  std::size_t accepted = 0;
  std::size_t skipped = 0;
  std::vector<std::string> errors;  // first few messages in lenient mode
};

struct EventLog {
  std::vector<ActivityEvent> events;  // stable-sorted by event_day
  std::vector<TopicId> topics;        // sorted, distinct
  Window window;
  ParseStats stats;
};

// Validates every event against the window and sorts by day. When topics is
// empty the topic set is the sorted set of topics referenced by the events.
EventLog make_event_log(std::vector<ActivityEvent> events, Window window,
                        std::vector<TopicId> topics = {});

EventLog parse_event_log(std::istream& in, const ParseOptions& options = {});

using ProfileTable = std::map<UserId, Profile>;

ProfileTable parse_profiles(std::istream& in, const ParseOptions& options = {});

struct EmbeddingRecord {
  VideoId video;
  std::vector<double> visual;
  std::vector<double> audio;
  int sentiment = 1;  // +1 or -1
};

class EmbeddingStore {
 public:
  // Throws Error(Shape) if the vector lengths differ from earlier records,
  // Error(Conflict) for a duplicate video and Error(Schema) for a sentiment
  // other than +1/-1.
  void insert(EmbeddingRecord record);

  const EmbeddingRecord* find(const VideoId& video) const;
  std::size_t size() const { return records_.size(); }
  std::size_t visual_dim() const { return visual_dim_; }
  std::size_t audio_dim() const { return audio_dim_; }

 private:
  std::unordered_map<VideoId, EmbeddingRecord> records_;
  std::size_t visual_dim_ = 0;
  std::size_t audio_dim_ = 0;
};

EmbeddingStore parse_embeddings(std::istream& in, const ParseOptions& options = {});

// Per-user profile-embedding overrides, unit-normalized on load.
std::map<UserId, std::vector<double>> parse_profile_embeddings(std::istream& in);

// Distinct actors of the log, sorted.
std::vector<UserId> actors(const EventLog& log);

StarGraph extract_star_graph(const EventLog& log, const UserId& central);

// Same as calling extract_star_graph per central, in one pass over the log.
std::vector<StarGraph> extract_star_graphs(const EventLog& log,
                                           std::span<const UserId> centrals);

}  // namespace contagion
