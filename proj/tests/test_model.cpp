#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <ctime>
#include <random>

#include "contagion/error.hpp"
#include "contagion/model.hpp"
#include "support.hpp"

using namespace contagion;
using namespace testing_support;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected contagion::Error");
  return ErrorKind::Parse;
}

std::time_t utc(int y, int mo, int d, int h = 0, int mi = 0, int s = 0) {
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  return timegm(&tm);
}

const std::vector<TopicId> kTopics = {"sports", "tech"};

}  // namespace

TEST_CASE("action names round-trip") {
  for (ActionKind k : kAllActions) CHECK(parse_action(to_string(k)) == k);
  CHECK_FALSE(parse_action("retweet").has_value());
  CHECK(carries_video(ActionKind::Create));
  CHECK_FALSE(carries_video(ActionKind::Follow));
  CHECK_FALSE(is_engagement(ActionKind::Play));
  CHECK(is_engagement(ActionKind::Create));
}

TEST_CASE("event validation names the offending field") {
  ActivityEvent like = react(ActionKind::Like, "c", "n", "v1", "tech", 1, 2);
  CHECK_NOTHROW(validate(like));
  like.video.reset();
  try {
    validate(like);
    FAIL("missing video accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
    CHECK(std::string(e.what()).find("video") != std::string::npos);
  }
  CHECK(kind_of([] { validate(play("c", "n", "v", "tech", 0, -1)); }) == ErrorKind::Range);
  CHECK(kind_of([] { validate(play("c", "n", "v", "tech", 5, 3)); }) == ErrorKind::Data);
  CHECK(kind_of([] { validate(play("", "n", "v", "tech", 0, 1)); }) == ErrorKind::Schema);
  CHECK_NOTHROW(validate(follow("c", "n", 0)));
}

TEST_CASE("profile validation") {
  Profile p{"u", 30, "f", "en", "x", 10};
  CHECK_NOTHROW(validate(p));
  p.age_years = 0;
  CHECK(kind_of([&] { validate(p); }) == ErrorKind::Range);
  p.age_years = 121;
  CHECK(kind_of([&] { validate(p); }) == ErrorKind::Range);
  p.age_years = 120;
  p.follower_count = -1;
  CHECK(kind_of([&] { validate(p); }) == ErrorKind::Range);
}

TEST_CASE("history matrix rejects negative entries") {
  HistoryMatrix m(kTopics, 3);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  m.set(1, 2, 4.0);
  m.add(1, 2, 1.5);
  CHECK(m.at(1, 2) == 5.5);
  CHECK(m.topic_index("tech") == 1u);
  CHECK_FALSE(m.topic_index("news").has_value());
  CHECK(kind_of([&] { m.set(0, 0, -1.0); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { m.add(0, 0, -0.5); }) == ErrorKind::Domain);
}

TEST_CASE("day index floors whole UTC days") {
  const Date start = parse_date("2024-02-27");
  CHECK(day_index(parse_timestamp("2024-02-27T00:00:00Z"), start) == 0);
  CHECK(day_index(parse_timestamp("2024-02-27T23:59:59Z"), start) == 0);
  CHECK(day_index(parse_timestamp("2024-02-29T12:00:00Z"), start) == 2);  // leap day
  CHECK(day_index(parse_timestamp("2024-05-02"), start) == 65);
  // Offsets shift the instant into the next or previous UTC day.
  CHECK(day_index(parse_timestamp("2024-02-27T23:30:00-01:00"), start) == 1);
  CHECK(day_index(parse_timestamp("2024-02-28T00:30:00+02:00"), start) == 0);
  CHECK(day_index(parse_timestamp("2024-02-28 06:00:00.250Z"), start) == 1);
  CHECK(kind_of([&] { day_index(parse_timestamp("2024-02-26T23:59:59Z"), start); }) ==
        ErrorKind::Range);
  CHECK(kind_of([] { parse_timestamp("2024-13-01"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_timestamp("2024-02-27T25:00:00Z"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_date("27/02/2024"); }) == ErrorKind::Parse);
}

TEST_CASE("day index agrees with timegm on random instants") {
  std::mt19937_64 rng(11);
  const std::time_t origin = utc(2023, 12, 30);
  const Date start = parse_date("2023-12-30");
  for (int i = 0; i < 2000; ++i) {
    const std::time_t t = origin + static_cast<std::time_t>(rng() % (400LL * 86400));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    REQUIRE(day_index(parse_timestamp(buf), start) == static_cast<int>((t - origin) / 86400));
  }
}

TEST_CASE("follow state is a step function that includes same-day events") {
  const std::vector<ActivityEvent> timeline = {follow("c", "n", 3), unfollow("c", "n", 10),
                                               follow("c", "n", 20), unfollow("c", "n", 20)};
  const auto state = FollowState::replay(timeline);
  CHECK_FALSE(state.followed_on(2));
  CHECK(state.followed_on(3));
  CHECK(state.followed_on(9));
  CHECK_FALSE(state.followed_on(10));
  CHECK_FALSE(state.followed_on(20));  // same-day events apply in order
  CHECK(FollowState::replay({}, true).followed_on(0));
  const std::vector<ActivityEvent> backwards = {follow("c", "n", 5), unfollow("c", "n", 1)};
  CHECK(kind_of([&] { FollowState::replay(backwards); }) == ErrorKind::Data);
}

TEST_CASE("edge histories count plays per topic and day") {
  std::vector<ActivityEvent> events;
  for (int i = 0; i < 15; ++i) events.push_back(play("c", "n", "v" + std::to_string(i), "tech", 3, 4));
  const auto h = build_edge_histories(events, {0, 7}, kTopics);
  CHECK(h.watch.at(1, 4) == 15.0);
  double total = 0.0;
  for (double x : h.watch.values()) total += x;
  CHECK(total == 15.0);
  CHECK(h.watched.size() == 15);
}

TEST_CASE("edge histories of no events are all zero") {
  const auto h = build_edge_histories({}, {0, 56}, kTopics);
  CHECK(h.watch.rows() == 2);
  CHECK(h.watch.cols() == 56);
  CHECK(std::all_of(h.watch.values().begin(), h.watch.values().end(), [](double x) { return x == 0.0; }));
  CHECK(std::all_of(h.actions.begin(), h.actions.end(), [](const auto& c) { return c.empty(); }));
  CHECK_FALSE(h.follow_state.followed_on(10));
}

TEST_CASE("an engagement lands in its event-day cell with its age") {
  const std::vector<ActivityEvent> events = {play("c", "n", "v", "sports", 2, 5),
                                             react(ActionKind::Like, "c", "n", "v", "sports", 2, 5)};
  const auto h = build_edge_histories(events, {0, 7}, kTopics);
  const auto cell = h.cell(0, 5);
  REQUIRE(cell.size() == 1);
  CHECK(cell[0].kind == ActionKind::Like);
  CHECK(cell[0].age() == 3);
  CHECK(h.cell(0, 2).empty());
}

TEST_CASE("window offset is applied to event days") {
  const std::vector<ActivityEvent> events = {play("c", "n", "v", "tech", 100, 102)};
  const auto h = build_edge_histories(events, {100, 7}, kTopics);
  CHECK(h.watch.at(1, 2) == 1.0);
}

TEST_CASE("edge history errors") {
  const std::vector<ActivityEvent> late = {play("c", "n", "v", "tech", 0, 7)};
  CHECK(kind_of([&] { build_edge_histories(late, {0, 7}, kTopics); }) == ErrorKind::Range);
  const std::vector<ActivityEvent> unknown = {play("c", "n", "v", "news", 0, 1)};
  CHECK(kind_of([&] { build_edge_histories(unknown, {0, 7}, kTopics); }) == ErrorKind::Schema);
  const std::vector<ActivityEvent> future = {play("c", "n", "v", "tech", 3, 1)};
  CHECK(kind_of([&] { build_edge_histories(future, {0, 7}, kTopics); }) == ErrorKind::Data);
}

TEST_CASE("property: edge histories ignore input order") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto star = random_star(rng, 1, 3, 14, 40);
    const auto ref = build_edge_histories(star.events, star.window, star.topics);
    std::shuffle(star.events.begin(), star.events.end(), rng);
    // Follow events must stay chronological relative to each other; the
    // random star has at most one per edge.
    const auto got = build_edge_histories(star.events, star.window, star.topics);
    REQUIRE(std::equal(ref.watch.values().begin(), ref.watch.values().end(),
                       got.watch.values().begin(), got.watch.values().end()));
    for (std::size_t i = 0; i < ref.actions.size(); ++i) {
      REQUIRE(ref.actions[i].size() == got.actions[i].size());
      for (std::size_t j = 0; j < ref.actions[i].size(); ++j) {
        CHECK(ref.actions[i][j].video == got.actions[i][j].video);
        CHECK(ref.actions[i][j].kind == got.actions[i][j].kind);
      }
    }
    REQUIRE(ref.watched.size() == got.watched.size());
    for (std::size_t i = 0; i < ref.watched.size(); ++i) CHECK(ref.watched[i].video == got.watched[i].video);
  }
}

TEST_CASE("property: the watch matrix partitions the plays") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto star = random_star(rng, 1, 4, 21, 60);
    const auto h = build_edge_histories(star.events, star.window, star.topics);
    const auto plays = std::count_if(star.events.begin(), star.events.end(),
                                     [](const ActivityEvent& e) { return e.action == ActionKind::Play; });
    const auto engagements = std::count_if(star.events.begin(), star.events.end(),
                                           [](const ActivityEvent& e) { return is_engagement(e.action); });
    double total = 0.0;
    for (double x : h.watch.values()) total += x;
    CHECK(total == static_cast<double>(plays));
    std::size_t cells = 0;
    for (const auto& c : h.actions) cells += c.size();
    CHECK(cells == static_cast<std::size_t>(engagements));
  }
}
