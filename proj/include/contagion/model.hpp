#pragma once

// Domain types shared by every stage of the estimator: activity events,
// user profiles, the topic x day grid and per-edge histories.

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace contagion {

using UserId = std::string;
using VideoId = std::string;
using TopicId = std::string;

struct Topic {
  TopicId id;
  std::string display_name;
};

enum class ActionKind : std::uint8_t {
  Play,
  Like,
  Download,
  Share,
  Create,
  Follow,
  Unfollow,
};

inline constexpr std::array<ActionKind, 7> kAllActions = {
    ActionKind::Play,   ActionKind::Like,   ActionKind::Download,
    ActionKind::Share,  ActionKind::Create, ActionKind::Follow,
    ActionKind::Unfollow};

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> parse_action(std::string_view text);

// Everything except Follow/Unfollow refers to a concrete video.
constexpr bool carries_video(ActionKind kind) {
  return kind != ActionKind::Follow && kind != ActionKind::Unfollow;
}

// Actions that contribute a term to the per-cell action weight.
constexpr bool is_engagement(ActionKind kind) {
  return kind == ActionKind::Like || kind == ActionKind::Download ||
         kind == ActionKind::Share || kind == ActionKind::Create;
}

struct ActivityEvent {
  UserId actor;
  ActionKind action = ActionKind::Play;
  std::optional<VideoId> video;
  std::optional<TopicId> topic;
  // Video creator for video-bearing actions, the target user for
  // Follow/Unfollow, and the attributed expressor for Create.
  UserId creator;
  std::optional<int> post_day;
  int event_day = 0;

  // event_day - post_day; 0 for Follow/Unfollow.
  int age() const { return post_day ? event_day - *post_day : 0; }
};

// Throws Error(Schema) naming the missing/invalid field, Error(Range) for a
// negative event day and Error(Data) for a post day after the event day.
void validate(const ActivityEvent& event);

struct Profile {
  UserId user_id;
  int age_years = 0;
  std::string gender;
  std::string language;
  std::string city;
  std::int64_t follower_count = 0;
};

void validate(const Profile& profile);

// Half-open range of absolute day indices [start_day, start_day + days).
struct Window {
  int start_day = 0;
  int days = 56;

  bool contains(int day) const {
    return day >= start_day && day < start_day + days;
  }
  int offset(int day) const { return day - start_day; }

  friend bool operator==(const Window&, const Window&) = default;
};

// Nonnegative |topics| x days matrix, row-major (topic-major, day-minor).
class HistoryMatrix {
 public:
  HistoryMatrix() = default;
  HistoryMatrix(std::vector<TopicId> topics, int window_days);

  std::size_t rows() const { return topics_.size(); }
  std::size_t cols() const { return days_; }
  const std::vector<TopicId>& topics() const { return topics_; }

  double at(std::size_t topic, std::size_t day) const {
    return values_[topic * days_ + day];
  }
  void set(std::size_t topic, std::size_t day, double value);
  void add(std::size_t topic, std::size_t day, double value);

  std::span<const double> row(std::size_t topic) const {
    return {values_.data() + topic * days_, days_};
  }
  std::span<const double> values() const { return values_; }

  std::optional<std::size_t> topic_index(std::string_view topic) const;

  bool same_shape(const HistoryMatrix& other) const {
    return topics_ == other.topics_ && days_ == other.days_;
  }

 private:
  std::vector<TopicId> topics_;
  std::size_t days_ = 0;
  std::vector<double> values_;
};

// Followed/not-followed as a step function of the day, obtained by replaying
// Follow/Unfollow events. The state on day d includes every event dated d.
class FollowState {
 public:
  explicit FollowState(bool initially_followed = false)
      : initial_(initially_followed) {}

  // Events must be in chronological order; same-day events apply in order.
  static FollowState replay(std::span<const ActivityEvent> timeline,
                            bool initially_followed = false);

  bool followed_on(int day) const;
  bool initially_followed() const { return initial_; }
  const std::vector<std::pair<int, bool>>& transitions() const {
    return transitions_;
  }

 private:
  bool initial_;
  std::vector<std::pair<int, bool>> transitions_;
};

struct ActionRecord {
  ActionKind kind = ActionKind::Like;
  VideoId video;
  int event_day = 0;
  int post_day = 0;

  int age() const { return event_day - post_day; }
};

struct WatchRecord {
  VideoId video;
  std::size_t topic = 0;
  int event_day = 0;
  int post_day = 0;
};

// Everything the estimator needs to know about one central-neighbor edge.
struct EdgeHistories {
  HistoryMatrix watch;
  // Engagement actions grouped per (topic, day) cell, row-major like watch.
  std::vector<std::vector<ActionRecord>> actions;
  // Play events in chronological order.
  std::vector<WatchRecord> watched;
  FollowState follow_state;

  std::span<const ActionRecord> cell(std::size_t topic, std::size_t day) const {
    return actions[topic * watch.cols() + day];
  }
};

EdgeHistories build_edge_histories(std::span<const ActivityEvent> events,
                                   const Window& window,
                                   std::span<const TopicId> topics,
                                   bool initially_followed = false);

struct StarEdge {
  UserId neighbor;
  std::vector<ActivityEvent> events;  // chronological
  EdgeHistories histories;
};

struct StarGraph {
  UserId central;
  std::vector<TopicId> topics;
  Window window;
  std::vector<StarEdge> edges;  // sorted by neighbor id

  const StarEdge* find(std::string_view neighbor) const;
};

// ---- time discretization --------------------------------------------------

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

// Accepts "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SS[.frac][Z|+HH:MM|-HH:MM]".
Timestamp parse_timestamp(std::string_view text);
Date parse_date(std::string_view text);

// Whole UTC days elapsed from the start of window_start to timestamp.
int day_index(Timestamp timestamp, Date window_start);

}  // namespace contagion
