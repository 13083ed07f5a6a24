#include "contagion/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "contagion/error.hpp"

namespace contagion {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxReportedErrors = 20;

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank line; false at end of stream.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }
  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

Error at_line(std::size_t line, const Error& e) {
  return Error(e.kind(), "line " + std::to_string(line) + ": " + e.what());
}

json parse_object(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw Error(ErrorKind::Parse, "record is not a JSON object");
  return obj;
}

void reject_unknown_fields(const json& obj, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(ErrorKind::Schema, "unknown field '" + key + "'");
  }
}

// Null and absent are treated alike for optional fields.
const json* field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string require_string(const json& obj, const char* name) {
  const json* v = field(obj, name);
  if (!v) throw Error(ErrorKind::Schema, std::string("missing field '") + name + "'");
  if (!v->is_string())
    throw Error(ErrorKind::Schema, std::string("field '") + name + "' must be a string");
  return v->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* name) {
  const json* v = field(obj, name);
  if (!v) return std::nullopt;
  if (!v->is_string())
    throw Error(ErrorKind::Schema, std::string("field '") + name + "' must be a string");
  return v->get<std::string>();
}

std::int64_t require_int(const json& obj, const char* name) {
  const json* v = field(obj, name);
  if (!v) throw Error(ErrorKind::Schema, std::string("missing field '") + name + "'");
  if (!v->is_number_integer())
    throw Error(ErrorKind::Schema, std::string("field '") + name + "' must be an integer");
  return v->get<std::int64_t>();
}

int to_day(std::int64_t value, const char* name) {
  if (value < -(1 << 30) || value > (1 << 30))
    throw Error(ErrorKind::Range, std::string("field '") + name + "' out of range");
  return static_cast<int>(value);
}

std::vector<double> require_vector(const json& obj, const char* name) {
  const json* v = field(obj, name);
  if (!v) throw Error(ErrorKind::Schema, std::string("missing field '") + name + "'");
  if (!v->is_array())
    throw Error(ErrorKind::Schema, std::string("field '") + name + "' must be an array");
  std::vector<double> out;
  out.reserve(v->size());
  for (const auto& x : *v) {
    if (!x.is_number())
      throw Error(ErrorKind::Schema, std::string("field '") + name + "' must hold numbers");
    const double d = x.get<double>();
    if (!std::isfinite(d))
      throw Error(ErrorKind::Schema, std::string("field '") + name + "' holds a non-finite value");
    out.push_back(d);
  }
  return out;
}

// An event whose day fields may still be raw timestamps.
struct RawEvent {
  ActivityEvent event;
  std::optional<Timestamp> event_time;
  std::optional<Timestamp> post_time;
  std::size_t line = 0;
};

RawEvent parse_event_record(const std::string& line, bool timestamps) {
  const json obj = parse_object(line);
  reject_unknown_fields(obj, {"actor", "action", "video", "topic", "creator", "post_day", "day"});
  RawEvent raw;
  ActivityEvent& ev = raw.event;
  ev.actor = require_string(obj, "actor");
  const std::string action = require_string(obj, "action");
  const auto kind = parse_action(action);
  if (!kind) throw Error(ErrorKind::Schema, "unknown action '" + action + "'");
  ev.action = *kind;
  ev.video = optional_string(obj, "video");
  ev.topic = optional_string(obj, "topic");
  ev.creator = require_string(obj, "creator");
  if (timestamps) {
    raw.event_time = parse_timestamp(require_string(obj, "day"));
    if (auto post = optional_string(obj, "post_day")) raw.post_time = parse_timestamp(*post);
  } else {
    ev.event_day = to_day(require_int(obj, "day"), "day");
    if (field(obj, "post_day")) ev.post_day = to_day(require_int(obj, "post_day"), "post_day");
  }
  return raw;
}

void check_in_window(const ActivityEvent& ev, const Window& window) {
  if (!window.contains(ev.event_day))
    throw Error(ErrorKind::Range, "event day " + std::to_string(ev.event_day) +
                                      " outside window [" + std::to_string(window.start_day) +
                                      ", " + std::to_string(window.start_day + window.days) + ")");
}

void note_skip(ParseStats& stats, const Error& e) {
  ++stats.skipped;
  if (stats.errors.size() < kMaxReportedErrors) stats.errors.emplace_back(e.what());
}

std::vector<TopicId> referenced_topics(const std::vector<ActivityEvent>& events) {
  std::set<TopicId> seen;
  for (const auto& ev : events)
    if (ev.topic) seen.insert(*ev.topic);
  return {seen.begin(), seen.end()};
}

void sort_by_day(std::vector<ActivityEvent>& events) {
  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return a.event_day < b.event_day;
  });
}

}  // namespace

EventLog make_event_log(std::vector<ActivityEvent> events, Window window,
                        std::vector<TopicId> topics) {
  for (const auto& ev : events) {
    validate(ev);
    check_in_window(ev, window);
  }
  if (topics.empty()) {
    topics = referenced_topics(events);
  } else {
    std::sort(topics.begin(), topics.end());
    topics.erase(std::unique(topics.begin(), topics.end()), topics.end());
    for (const auto& ev : events) {
      if (ev.topic && !std::binary_search(topics.begin(), topics.end(), *ev.topic))
        throw Error(ErrorKind::Schema, "undeclared topic '" + *ev.topic + "'");
    }
  }
  sort_by_day(events);
  EventLog log{std::move(events), std::move(topics), window, {}};
  log.stats.lines = log.events.size();
  log.stats.accepted = log.events.size();
  return log;
}

EventLog parse_event_log(std::istream& in, const ParseOptions& options) {
  if (options.window_days < 1) throw Error(ErrorKind::Config, "window must span at least one day");
  const Window window{0, options.window_days};
  EventLog log;
  log.window = window;
  LineReader reader(in);
  std::string line;
  std::vector<RawEvent> pending;  // timestamp mode only

  auto accept = [&](ActivityEvent ev) {
    validate(ev);
    check_in_window(ev, window);
    log.events.push_back(std::move(ev));
    ++log.stats.accepted;
  };

  while (reader.next(line)) {
    ++log.stats.lines;
    try {
      RawEvent raw = parse_event_record(line, options.timestamps);
      if (options.timestamps) {
        raw.line = reader.number();
        pending.push_back(std::move(raw));
      } else {
        accept(std::move(raw.event));
      }
    } catch (const Error& e) {
      if (!options.lenient) throw at_line(reader.number(), e);
      note_skip(log.stats, at_line(reader.number(), e));
    }
  }

  if (options.timestamps && !pending.empty()) {
    Date start;
    if (options.window_start) {
      start = *options.window_start;
    } else {
      auto earliest = std::min_element(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
        return *a.event_time < *b.event_time;
      });
      start = std::chrono::floor<std::chrono::days>(*earliest->event_time);
    }
    const Timestamp origin{start};
    for (auto& raw : pending) {
      try {
        raw.event.event_day = day_index(*raw.event_time, start);
        if (raw.post_time)
          raw.event.post_day = static_cast<int>(
              std::chrono::floor<std::chrono::days>(*raw.post_time - origin).count());
        accept(std::move(raw.event));
      } catch (const Error& e) {
        if (!options.lenient) throw at_line(raw.line, e);
        note_skip(log.stats, at_line(raw.line, e));
      }
    }
  }

  log.topics = referenced_topics(log.events);
  sort_by_day(log.events);
  return log;
}

ProfileTable parse_profiles(std::istream& in, const ParseOptions& options) {
  ProfileTable table;
  LineReader reader(in);
  std::string line;
  while (reader.next(line)) {
    try {
      const json obj = parse_object(line);
      reject_unknown_fields(obj, {"user", "age", "gender", "language", "city", "followers"});
      Profile p;
      p.user_id = require_string(obj, "user");
      const auto age = require_int(obj, "age");
      if (age < 1 || age > 120)
        throw Error(ErrorKind::Range, "age " + std::to_string(age) + " outside [1, 120]");
      p.age_years = static_cast<int>(age);
      p.gender = require_string(obj, "gender");
      p.language = require_string(obj, "language");
      p.city = require_string(obj, "city");
      p.follower_count = require_int(obj, "followers");
      validate(p);
      if (table.contains(p.user_id))
        throw Error(ErrorKind::Conflict, "duplicate user '" + p.user_id + "'");
      table.emplace(p.user_id, std::move(p));
    } catch (const Error& e) {
      if (!options.lenient || e.kind() == ErrorKind::Conflict) throw at_line(reader.number(), e);
    }
  }
  return table;
}

void EmbeddingStore::insert(EmbeddingRecord record) {
  if (record.sentiment != 1 && record.sentiment != -1)
    throw Error(ErrorKind::Schema, "sentiment must be 1 or -1");
  if (records_.empty()) {
    visual_dim_ = record.visual.size();
    audio_dim_ = record.audio.size();
  } else if (record.visual.size() != visual_dim_ || record.audio.size() != audio_dim_) {
    throw Error(ErrorKind::Shape, "embedding dimensions of video '" + record.video +
                                      "' differ from earlier records");
  }
  auto key = record.video;
  if (!records_.emplace(std::move(key), std::move(record)).second)
    throw Error(ErrorKind::Conflict, "duplicate video in embeddings");
}

const EmbeddingRecord* EmbeddingStore::find(const VideoId& video) const {
  auto it = records_.find(video);
  return it == records_.end() ? nullptr : &it->second;
}

EmbeddingStore parse_embeddings(std::istream& in, const ParseOptions& options) {
  EmbeddingStore store;
  LineReader reader(in);
  std::string line;
  while (reader.next(line)) {
    try {
      const json obj = parse_object(line);
      reject_unknown_fields(obj, {"video", "visual", "audio", "sentiment"});
      EmbeddingRecord rec;
      rec.video = require_string(obj, "video");
      rec.visual = require_vector(obj, "visual");
      rec.audio = require_vector(obj, "audio");
      rec.sentiment = static_cast<int>(require_int(obj, "sentiment"));
      store.insert(std::move(rec));
    } catch (const Error& e) {
      if (!options.lenient) throw at_line(reader.number(), e);
    }
  }
  return store;
}

std::map<UserId, std::vector<double>> parse_profile_embeddings(std::istream& in) {
  std::map<UserId, std::vector<double>> out;
  LineReader reader(in);
  std::string line;
  while (reader.next(line)) {
    try {
      const json obj = parse_object(line);
      reject_unknown_fields(obj, {"user", "vector"});
      auto user = require_string(obj, "user");
      auto vec = require_vector(obj, "vector");
      double norm = 0.0;
      for (double x : vec) norm += x * x;
      norm = std::sqrt(norm);
      if (norm == 0.0) throw Error(ErrorKind::Degenerate, "zero profile embedding for '" + user + "'");
      for (double& x : vec) x /= norm;
      if (!out.emplace(user, std::move(vec)).second)
        throw Error(ErrorKind::Conflict, "duplicate user '" + user + "'");
    } catch (const Error& e) {
      throw at_line(reader.number(), e);
    }
  }
  return out;
}

std::vector<UserId> actors(const EventLog& log) {
  std::set<UserId> seen;
  for (const auto& ev : log.events) seen.insert(ev.actor);
  return {seen.begin(), seen.end()};
}

namespace {

StarGraph build_star(const EventLog& log, const UserId& central,
                     const std::vector<const ActivityEvent*>& events) {
  if (events.empty()) throw Error(ErrorKind::NotFound, "central user '" + central + "' not found in event log");
  std::map<UserId, std::vector<ActivityEvent>> by_neighbor;
  for (const ActivityEvent* ev : events) {
    if (ev->creator == central)
      throw Error(ErrorKind::Data, "event of '" + central + "' names the user itself as creator");
    by_neighbor[ev->creator].push_back(*ev);
  }
  StarGraph star{central, log.topics, log.window, {}};
  star.edges.reserve(by_neighbor.size());
  for (auto& [neighbor, edge_events] : by_neighbor) {
    auto histories = build_edge_histories(edge_events, log.window, log.topics);
    star.edges.push_back({neighbor, std::move(edge_events), std::move(histories)});
  }
  return star;
}

}  // namespace

StarGraph extract_star_graph(const EventLog& log, const UserId& central) {
  std::vector<const ActivityEvent*> events;
  for (const auto& ev : log.events)
    if (ev.actor == central) events.push_back(&ev);
  return build_star(log, central, events);
}

std::vector<StarGraph> extract_star_graphs(const EventLog& log, std::span<const UserId> centrals) {
  std::unordered_map<std::string_view, std::vector<const ActivityEvent*>> by_actor;
  for (const auto& c : centrals) by_actor.try_emplace(c);
  for (const auto& ev : log.events) {
    auto it = by_actor.find(ev.actor);
    if (it != by_actor.end()) it->second.push_back(&ev);
  }
  std::vector<StarGraph> out;
  out.reserve(centrals.size());
  for (const auto& c : centrals) out.push_back(build_star(log, c, by_actor[c]));
  return out;
}

}  // namespace contagion
