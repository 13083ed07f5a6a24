#include "contagion/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>
#include <unordered_map>

#include "contagion/error.hpp"

namespace contagion {

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Play: return "play";
    case ActionKind::Like: return "like";
    case ActionKind::Download: return "download";
    case ActionKind::Share: return "share";
    case ActionKind::Create: return "create";
    case ActionKind::Follow: return "follow";
    case ActionKind::Unfollow: return "unfollow";
  }
  return "?";
}

std::optional<ActionKind> parse_action(std::string_view text) {
  for (ActionKind kind : kAllActions) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

void validate(const ActivityEvent& event) {
  if (event.actor.empty()) throw Error(ErrorKind::Schema, "missing field 'actor'");
  if (event.creator.empty())
    throw Error(ErrorKind::Schema, "missing field 'creator'");
  if (event.event_day < 0)
    throw Error(ErrorKind::Range, "event day " + std::to_string(event.event_day) +
                                      " is negative");
  if (carries_video(event.action)) {
    const std::string action(to_string(event.action));
    if (!event.video || event.video->empty())
      throw Error(ErrorKind::Schema, "missing field 'video' on " + action);
    if (!event.topic || event.topic->empty())
      throw Error(ErrorKind::Schema, "missing field 'topic' on " + action);
    if (!event.post_day)
      throw Error(ErrorKind::Schema, "missing field 'post_day' on " + action);
    if (*event.post_day > event.event_day)
      throw Error(ErrorKind::Data, "negative age: video " + *event.video +
                                       " posted on day " +
                                       std::to_string(*event.post_day) +
                                       " after event day " +
                                       std::to_string(event.event_day));
  }
}

void validate(const Profile& profile) {
  if (profile.user_id.empty())
    throw Error(ErrorKind::Schema, "missing field 'user'");
  if (profile.age_years < 1 || profile.age_years > 120)
    throw Error(ErrorKind::Range, "age " + std::to_string(profile.age_years) +
                                      " of user " + profile.user_id +
                                      " outside [1, 120]");
  if (profile.follower_count < 0)
    throw Error(ErrorKind::Range,
                "negative follower count for user " + profile.user_id);
}

// ---- HistoryMatrix --------------------------------------------------------

HistoryMatrix::HistoryMatrix(std::vector<TopicId> topics, int window_days)
    : topics_(std::move(topics)) {
  if (window_days < 0)
    throw Error(ErrorKind::Shape, "window must have a nonnegative length");
  days_ = static_cast<std::size_t>(window_days);
  values_.assign(topics_.size() * days_, 0.0);
}

void HistoryMatrix::set(std::size_t topic, std::size_t day, double value) {
  if (!(value >= 0.0))
    throw Error(ErrorKind::Domain, "history entries must be nonnegative");
  values_[topic * days_ + day] = value;
}

void HistoryMatrix::add(std::size_t topic, std::size_t day, double value) {
  set(topic, day, at(topic, day) + value);
}

std::optional<std::size_t> HistoryMatrix::topic_index(std::string_view topic) const {
  auto it = std::find(topics_.begin(), topics_.end(), topic);
  if (it == topics_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - topics_.begin());
}

// ---- FollowState ----------------------------------------------------------

FollowState FollowState::replay(std::span<const ActivityEvent> timeline,
                                bool initially_followed) {
  FollowState state(initially_followed);
  for (const auto& event : timeline) {
    if (event.action == ActionKind::Follow)
      state.transitions_.emplace_back(event.event_day, true);
    else if (event.action == ActionKind::Unfollow)
      state.transitions_.emplace_back(event.event_day, false);
  }
  if (!std::is_sorted(state.transitions_.begin(), state.transitions_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; }))
    throw Error(ErrorKind::Data, "follow timeline is not chronological");
  return state;
}

bool FollowState::followed_on(int day) const {
  bool followed = initial_;
  for (const auto& [when, state] : transitions_) {
    if (when > day) break;
    followed = state;
  }
  return followed;
}

// ---- edge histories -------------------------------------------------------

EdgeHistories build_edge_histories(std::span<const ActivityEvent> events,
                                   const Window& window,
                                   std::span<const TopicId> topics,
                                   bool initially_followed) {
  std::unordered_map<std::string_view, std::size_t> topic_rows;
  for (std::size_t i = 0; i < topics.size(); ++i) topic_rows.emplace(topics[i], i);

  EdgeHistories out{HistoryMatrix({topics.begin(), topics.end()}, window.days),
                    {},
                    {},
                    FollowState(initially_followed)};
  out.actions.resize(topics.size() * static_cast<std::size_t>(window.days));

  std::vector<ActivityEvent> timeline;
  for (const auto& event : events) {
    if (!window.contains(event.event_day))
      throw Error(ErrorKind::Range, "event on day " + std::to_string(event.event_day) +
                                        " falls outside the window");
    if (!carries_video(event.action)) {
      timeline.push_back(event);
      continue;
    }
    auto row = topic_rows.find(*event.topic);
    if (row == topic_rows.end())
      throw Error(ErrorKind::Schema, "unknown topic '" + *event.topic + "'");
    if (event.age() < 0)
      throw Error(ErrorKind::Data, "negative age for video " + *event.video);
    const auto day = static_cast<std::size_t>(window.offset(event.event_day));
    if (event.action == ActionKind::Play) {
      out.watch.add(row->second, day, 1.0);
      out.watched.push_back({*event.video, row->second, event.event_day, *event.post_day});
    } else {
      out.actions[row->second * out.watch.cols() + day].push_back(
          {event.action, *event.video, event.event_day, *event.post_day});
    }
  }

  // Canonical orders make every downstream sum independent of input order.
  std::sort(out.watched.begin(), out.watched.end(), [](const auto& a, const auto& b) {
    return std::tie(a.event_day, a.video, a.post_day, a.topic) <
           std::tie(b.event_day, b.video, b.post_day, b.topic);
  });
  for (auto& cell : out.actions) {
    std::sort(cell.begin(), cell.end(), [](const auto& a, const auto& b) {
      return std::tie(a.kind, a.video, a.post_day) < std::tie(b.kind, b.video, b.post_day);
    });
  }
  std::stable_sort(timeline.begin(), timeline.end(),
                   [](const auto& a, const auto& b) { return a.event_day < b.event_day; });
  out.follow_state = FollowState::replay(timeline, initially_followed);
  return out;
}

const StarEdge* StarGraph::find(std::string_view neighbor) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), neighbor,
                             [](const StarEdge& e, std::string_view id) { return e.neighbor < id; });
  if (it == edges.end() || it->neighbor != neighbor) return nullptr;
  return &*it;
}

// ---- time -----------------------------------------------------------------

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  if (pos + len > text.size())
    throw Error(ErrorKind::Parse, "truncated date-time '" + std::string(whole) + "'");
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc{} || ptr != text.data() + pos + len)
    throw Error(ErrorKind::Parse, "invalid date-time '" + std::string(whole) + "'");
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view whole) {
  if (pos >= text.size() || text[pos] != c)
    throw Error(ErrorKind::Parse, "invalid date-time '" + std::string(whole) + "'");
}

}  // namespace

Date parse_date(std::string_view text) {
  using namespace std::chrono;
  if (text.size() < 10)
    throw Error(ErrorKind::Parse, "invalid date '" + std::string(text) + "'");
  const int y = read_int(text, 0, 4, text);
  expect_char(text, 4, '-', text);
  const int m = read_int(text, 5, 2, text);
  expect_char(text, 7, '-', text);
  const int d = read_int(text, 8, 2, text);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error(ErrorKind::Parse, "invalid date '" + std::string(text) + "'");
  return sys_days{ymd};
}

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  const Date date = parse_date(text);
  if (text.size() == 10) return Timestamp{date};
  if (text[10] != 'T' && text[10] != ' ')
    throw Error(ErrorKind::Parse, "invalid date-time '" + std::string(text) + "'");
  const int hh = read_int(text, 11, 2, text);
  expect_char(text, 13, ':', text);
  const int mm = read_int(text, 14, 2, text);
  expect_char(text, 16, ':', text);
  const int ss = read_int(text, 17, 2, text);
  if (hh > 23 || mm > 59 || ss > 60)
    throw Error(ErrorKind::Parse, "invalid time of day in '" + std::string(text) + "'");
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  Timestamp ts = Timestamp{date} + hours{hh} + minutes{mm} + seconds{ss};
  if (pos == text.size()) return ts;
  if (text[pos] == 'Z' && pos + 1 == text.size()) return ts;
  if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size()) {
    const int oh = read_int(text, pos + 1, 2, text);
    expect_char(text, pos + 3, ':', text);
    const int om = read_int(text, pos + 4, 2, text);
    const auto offset = hours{oh} + minutes{om};
    // Local time = UTC + offset.
    return text[pos] == '+' ? ts - offset : ts + offset;
  }
  throw Error(ErrorKind::Parse, "invalid UTC offset in '" + std::string(text) + "'");
}

int day_index(Timestamp timestamp, Date window_start) {
  using namespace std::chrono;
  const Timestamp origin{window_start};
  if (timestamp < origin)
    throw Error(ErrorKind::Range, "timestamp precedes the window start");
  return static_cast<int>(floor<days>(timestamp - origin).count());
}

}  // namespace contagion
