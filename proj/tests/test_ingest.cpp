#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <sstream>

#include "contagion/error.hpp"
#include "contagion/ingest.hpp"
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

std::string error_text(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

EventLog parse(const std::string& text, ParseOptions options = {}) {
  std::istringstream in(text);
  return parse_event_log(in, options);
}

const char* kPlay = R"({"actor":"c","action":"play","video":"v1","topic":"tech","creator":"n","post_day":1,"day":2})";

}  // namespace

TEST_CASE("a well-formed log parses and sorts by day") {
  const std::string text = std::string(R"({"actor":"c","action":"like","video":"v1","topic":"tech","creator":"n","post_day":1,"day":5})") +
                           "\n\n" + kPlay + "\n" +
                           R"({"actor":"c","action":"follow","creator":"n","day":0})" + "\n";
  const auto log = parse(text);
  REQUIRE(log.events.size() == 3);
  CHECK(log.events[0].action == ActionKind::Follow);
  CHECK(log.events[1].action == ActionKind::Play);
  CHECK(log.events[2].action == ActionKind::Like);
  CHECK(log.topics == std::vector<TopicId>{"tech"});
  CHECK(log.stats.lines == 3);
  CHECK(log.stats.accepted == 3);
  CHECK(log.window.days == 56);
}

TEST_CASE("schema errors carry the line number") {
  const std::string bad = std::string(kPlay) + "\n" +
                          R"({"actor":"c","action":"retweet","video":"v","topic":"t","creator":"n","post_day":1,"day":2})";
  CHECK(kind_of([&] { parse(bad); }) == ErrorKind::Schema);
  CHECK(error_text([&] { parse(bad); }).rfind("line 2: ", 0) == 0);

  const std::string no_video = R"({"actor":"c","action":"like","topic":"t","creator":"n","post_day":1,"day":2})";
  CHECK(kind_of([&] { parse(no_video); }) == ErrorKind::Schema);
  CHECK(error_text([&] { parse(no_video); }).find("video") != std::string::npos);

  CHECK(kind_of([&] { parse("{not json"); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { parse("[1,2]"); }) == ErrorKind::Parse);
  CHECK(kind_of([&] {
          parse(R"({"actor":"c","action":"play","video":"v","topic":"t","creator":"n","post_day":1,"day":2,"extra":0})");
        }) == ErrorKind::Schema);
  CHECK(kind_of([&] {
          parse(R"({"actor":"c","action":"play","video":"v","topic":"t","creator":"n","post_day":1,"day":"2"})");
        }) == ErrorKind::Schema);
}

TEST_CASE("range and data errors") {
  CHECK(kind_of([] { parse(R"({"actor":"c","action":"play","video":"v","topic":"t","creator":"n","post_day":1,"day":56})"); }) ==
        ErrorKind::Range);
  CHECK(kind_of([] { parse(R"({"actor":"c","action":"play","video":"v","topic":"t","creator":"n","post_day":4,"day":2})"); }) ==
        ErrorKind::Data);
  ParseOptions short_window;
  short_window.window_days = 0;
  CHECK(kind_of([&] { parse(kPlay, short_window); }) == ErrorKind::Config);
}

TEST_CASE("lenient mode skips bad lines and counts them") {
  const std::string text = std::string(kPlay) + "\n{oops\n" + kPlay + "\n" +
                           R"({"actor":"c","action":"like","topic":"t","creator":"n","post_day":1,"day":2})";
  ParseOptions lenient;
  lenient.lenient = true;
  const auto log = parse(text, lenient);
  CHECK(log.events.size() == 2);
  CHECK(log.stats.lines == 4);
  CHECK(log.stats.accepted == 2);
  CHECK(log.stats.skipped == 2);
  REQUIRE(log.stats.errors.size() == 2);
  CHECK(log.stats.errors[0].rfind("line 2: ", 0) == 0);
}

TEST_CASE("timestamp mode discretizes against the earliest event date") {
  const std::string text =
      R"({"actor":"c","action":"play","video":"v","topic":"t","creator":"n","post_day":"2024-03-01T08:00:00Z","day":"2024-03-03T10:00:00Z"})"
      "\n"
      R"({"actor":"c","action":"play","video":"w","topic":"t","creator":"n","post_day":"2024-02-20","day":"2024-03-01T23:00:00-02:00"})";
  ParseOptions ts;
  ts.timestamps = true;
  const auto log = parse(text, ts);
  REQUIRE(log.events.size() == 2);
  // 23:00 at -02:00 is 01:00 on 2024-03-02 UTC, so the earliest UTC date is 2024-03-02.
  CHECK(log.events[0].event_day == 0);
  CHECK(log.events[0].post_day == -11);
  CHECK(log.events[1].event_day == 1);
  CHECK(log.events[1].post_day == -1);

  ts.window_start = parse_date("2024-03-01");
  const auto anchored = parse(text, ts);
  CHECK(anchored.events[0].event_day == 1);
  CHECK(anchored.events[1].event_day == 2);
}

TEST_CASE("a large log parses completely") {
  std::ostringstream text;
  const int n = 200000;
  for (int i = 0; i < n; ++i)
    text << R"({"actor":"c)" << i % 48 << R"(","action":"play","video":"v)" << i << R"(","topic":"t)" << i % 8
         << R"(","creator":"n)" << i % 500 << R"(","post_day":)" << (i % 56) / 2 << R"(,"day":)" << i % 56 << "}\n";
  const auto t0 = std::chrono::steady_clock::now();
  const auto log = parse(text.str());
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(log.events.size() == static_cast<std::size_t>(n));
  CHECK(log.topics.size() == 8);
  CHECK(actors(log).size() == 48);
  CHECK(secs < 30.0);
}

TEST_CASE("profiles") {
  std::istringstream ok(R"({"user":"a","age":30,"gender":"f","language":"en","city":"x","followers":12})"
                        "\n"
                        R"({"user":"b","age":1,"gender":"m","language":"de","city":"y","followers":0})");
  const auto table = parse_profiles(ok);
  REQUIRE(table.size() == 2);
  CHECK(table.at("a").follower_count == 12);

  std::istringstream dup(R"({"user":"a","age":30,"gender":"f","language":"en","city":"x","followers":12})"
                         "\n"
                         R"({"user":"a","age":31,"gender":"f","language":"en","city":"x","followers":12})");
  ParseOptions lenient;
  lenient.lenient = true;
  CHECK(kind_of([&] { parse_profiles(dup, lenient); }) == ErrorKind::Conflict);

  std::istringstream old(R"({"user":"a","age":121,"gender":"f","language":"en","city":"x","followers":12})");
  CHECK(kind_of([&] { parse_profiles(old); }) == ErrorKind::Range);
}

TEST_CASE("embedding store") {
  EmbeddingStore store;
  store.insert({"v1", {1, 2}, {3}, 1});
  CHECK(store.visual_dim() == 2);
  CHECK(store.audio_dim() == 1);
  CHECK(store.find("v1") != nullptr);
  CHECK(store.find("v2") == nullptr);
  CHECK(kind_of([&] { store.insert({"v2", {1, 2, 3}, {3}, 1}); }) == ErrorKind::Shape);
  CHECK(kind_of([&] { store.insert({"v1", {1, 2}, {3}, 1}); }) == ErrorKind::Conflict);
  CHECK(kind_of([&] { store.insert({"v3", {1, 2}, {3}, 0}); }) == ErrorKind::Schema);

  std::istringstream in(R"({"video":"a","visual":[0.1,0.2],"audio":[1,2,3],"sentiment":-1})");
  const auto parsed = parse_embeddings(in);
  REQUIRE(parsed.find("a") != nullptr);
  CHECK(parsed.find("a")->sentiment == -1);
  CHECK(parsed.audio_dim() == 3);
}

TEST_CASE("profile embedding overrides are normalized") {
  std::istringstream in(R"({"user":"a","vector":[3,4]})");
  const auto overrides = parse_profile_embeddings(in);
  CHECK(overrides.at("a")[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(overrides.at("a")[1] == doctest::Approx(0.8).epsilon(1e-15));
  std::istringstream zero(R"({"user":"a","vector":[0,0]})");
  CHECK(kind_of([&] { parse_profile_embeddings(zero); }) == ErrorKind::Degenerate);
}

TEST_CASE("star extraction groups events by neighbor") {
  std::vector<ActivityEvent> events = {play("c", "b", "v1", "t", 0, 1), play("c", "a", "v2", "t", 0, 1),
                                       play("c", "b", "v3", "t", 1, 2), play("x", "a", "v2", "t", 0, 3)};
  auto log = make_event_log(events, {0, 7});
  const auto star = extract_star_graph(log, "c");
  REQUIRE(star.edges.size() == 2);
  CHECK(star.edges[0].neighbor == "a");
  CHECK(star.edges[1].neighbor == "b");
  CHECK(star.edges[1].events.size() == 2);
  CHECK(star.find("b") == &star.edges[1]);
  CHECK(star.find("z") == nullptr);

  // A neighbor reached only through a follow still gets an (empty) edge.
  events.push_back(follow("c", "d", 0));
  log = make_event_log(events, {0, 7});
  const auto with_follow = extract_star_graph(log, "c");
  REQUIRE(with_follow.edges.size() == 3);
  CHECK(with_follow.edges[2].neighbor == "d");
  CHECK(with_follow.edges[2].histories.watched.empty());
  CHECK(with_follow.edges[2].histories.follow_state.followed_on(0));

  CHECK(kind_of([&] { extract_star_graph(log, "nobody"); }) == ErrorKind::NotFound);
  log = make_event_log({play("c", "c", "v", "t", 0, 1)}, {0, 7});
  CHECK(kind_of([&] { extract_star_graph(log, "c"); }) == ErrorKind::Data);
}

TEST_CASE("a star with thousands of neighbors") {
  std::vector<ActivityEvent> events;
  const int m = 6587;
  for (int k = 0; k < m; ++k) events.push_back(play("c", "n" + std::to_string(k), "v" + std::to_string(k), "t", 0, k % 56));
  const auto log = make_event_log(std::move(events), {0, 56});
  const auto star = extract_star_graph(log, "c");
  CHECK(star.edges.size() == static_cast<std::size_t>(m));
  const std::vector<UserId> centrals = {"c"};
  const auto batched = extract_star_graphs(log, centrals);
  REQUIRE(batched.size() == 1);
  CHECK(batched[0].edges.size() == star.edges.size());
}

TEST_CASE("declared topics reject undeclared references") {
  CHECK(kind_of([] { make_event_log({play("c", "n", "v", "news", 0, 1)}, {0, 7}, {"tech"}); }) == ErrorKind::Schema);
  const auto log = make_event_log({play("c", "n", "v", "tech", 0, 1)}, {0, 7}, {"tech", "art"});
  CHECK(log.topics == std::vector<TopicId>{"art", "tech"});
}
