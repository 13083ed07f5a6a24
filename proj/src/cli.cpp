#include "contagion/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "contagion/activity.hpp"
#include "contagion/bench.hpp"
#include "contagion/diffusion.hpp"
#include "contagion/error.hpp"
#include "contagion/ingest.hpp"
#include "contagion/parallel.hpp"
#include "contagion/scenarios.hpp"
#include "contagion/similarity.hpp"
#include "contagion/synth.hpp"

namespace contagion {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

namespace {

struct CommonOptions {
  std::string events;
  std::string profiles;
  std::string embeddings;
  std::string profile_embeddings;
  int window_days = 56;
  std::string window_start;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out;
  bool lenient = false;
  bool timestamps = false;

  ParseOptions parse_options() const {
    ParseOptions o;
    o.lenient = lenient;
    o.timestamps = timestamps;
    o.window_days = window_days;
    if (!window_start.empty()) o.window_start = parse_date(window_start);
    return o;
  }

  ordered_json snapshot() const {
    ordered_json j;
    j["window_days"] = window_days;
    if (!window_start.empty()) j["window_start"] = window_start;
    j["workers"] = workers;
    j["lenient"] = lenient;
    j["timestamps"] = timestamps;
    return j;
  }
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--events", o.events, "Event log (JSON lines)");
  app->add_option("--profiles", o.profiles, "User profiles (JSON lines)");
  app->add_option("--embeddings", o.embeddings, "Video embeddings (JSON lines)");
  app->add_option("--profile-embeddings", o.profile_embeddings,
                  "Per-user profile embedding overrides (JSON lines)");
  app->add_option("--window-days", o.window_days, "Window length in days")->check(CLI::PositiveNumber);
  app->add_option("--window-start", o.window_start, "Window origin (YYYY-MM-DD) for --timestamps");
  app->add_option("--seed", o.seed, "Random seed");
  app->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "Output directory");
  app->add_flag("--lenient", o.lenient, "Skip invalid records instead of failing");
  app->add_flag("--timestamps", o.timestamps, "Day fields are ISO-8601 date-times");
}

void add_synth_options(CLI::App* app, SynthConfig& c) {
  app->add_option("--n-central", c.n_central, "Central users");
  app->add_option("--avg-neighbors", c.avg_neighbors, "Average neighbors per central user");
  app->add_option("--weeks", c.weeks, "Weeks of activity");
  app->add_option("--topics", c.topics, "Number of topics");
  app->add_option("--negative-fraction", c.negative_fraction, "P(sentiment = -1)");
  app->add_option("--homophily", c.homophily_level, "Homophily level in [0, 1]");
  app->add_option("--latency", c.reaction_latency_mean_days, "Mean reaction age in days");
  app->add_option("--plays-per-day", c.plays_per_day, "Mean daily plays per central user");
  app->add_option("--homophilic-core", c.homophilic_core, "Homophilic neighbors per central user");
}

ordered_json synth_snapshot(const SynthConfig& c) {
  ordered_json j;
  j["n_central"] = c.n_central;
  j["avg_neighbors"] = c.avg_neighbors;
  j["weeks"] = c.weeks;
  j["topics"] = c.topics;
  j["negative_fraction"] = c.negative_fraction;
  j["homophily_level"] = c.homophily_level;
  j["reaction_latency_mean_days"] = c.reaction_latency_mean_days;
  j["plays_per_day"] = c.plays_per_day;
  j["homophilic_core"] = c.homophilic_core;
  j["negative_engagement_boost"] = c.negative_engagement_boost;
  j["engagement"] = {{"like", c.engagement.like},         {"share", c.engagement.share},
                     {"download", c.engagement.download}, {"follow", c.engagement.follow},
                     {"unfollow", c.engagement.unfollow}, {"create", c.engagement.create}};
  return j;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorKind::Config, std::string("missing required flag ") + flag);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot open input file " + path);
  return in;
}

// Records inputs and outputs of one command and writes the manifest.
class Run {
 public:
  Run(std::string command, const CommonOptions& common) : common_(common) {
    manifest_["command"] = std::move(command);
    manifest_["tool_version"] = std::string(kToolVersion);
    manifest_["seed"] = common.seed;
    manifest_["config"] = common.snapshot();
    manifest_["inputs"] = ordered_json::object();
    manifest_["outputs"] = ordered_json::array();
    if (!common.out.empty()) fs::create_directories(common.out);
  }

  ordered_json& config() { return manifest_["config"]; }

  void input(const char* role, const std::string& path) {
    if (path.empty()) return;
    manifest_["inputs"][role] = {{"path", path}, {"sha256", file_sha256(path)}};
  }

  void write(const std::string& name, const std::string& contents) {
    std::ofstream f(fs::path(common_.out) / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::Config, "cannot write " + (fs::path(common_.out) / name).string());
    f << contents;
    manifest_["outputs"].push_back(name);
  }

  void finish() {
    if (common_.out.empty()) return;
    std::ofstream f(fs::path(common_.out) / "manifest.json", std::ios::binary | std::ios::trunc);
    f << manifest_.dump(2) << '\n';
  }

 private:
  const CommonOptions& common_;
  ordered_json manifest_;
};

EventLog load_events(const CommonOptions& o) {
  require(o.events, "--events");
  auto in = open_input(o.events);
  return parse_event_log(in, o.parse_options());
}

SimilarityProviders load_providers(const CommonOptions& o) {
  require(o.profiles, "--profiles");
  require(o.embeddings, "--embeddings");
  auto pin = open_input(o.profiles);
  auto profiles = parse_profiles(pin, o.parse_options());
  auto ein = open_input(o.embeddings);
  auto store = parse_embeddings(ein, o.parse_options());
  std::map<UserId, std::vector<double>> overrides;
  if (!o.profile_embeddings.empty()) {
    auto oin = open_input(o.profile_embeddings);
    overrides = parse_profile_embeddings(oin);
  }
  return SimilarityProviders(std::move(profiles), std::move(store), std::move(overrides));
}

std::vector<UserId> resolve_centrals(const EventLog& log, const std::vector<std::string>& requested) {
  const auto present = actors(log);
  if (requested.empty()) return present;
  for (const auto& id : requested) {
    if (!std::binary_search(present.begin(), present.end(), id))
      throw Error(ErrorKind::NotFound, "central user '" + id + "' not found in event log");
  }
  return requested;
}

int cmd_ingest(const CommonOptions& o, std::ostream& out) {
  Run run("ingest", o);
  const auto log = load_events(o);
  run.input("events", o.events);
  ordered_json summary;
  summary["lines"] = log.stats.lines;
  summary["events"] = log.events.size();
  summary["skipped"] = log.stats.skipped;
  summary["errors"] = log.stats.errors;
  summary["topics"] = log.topics;
  summary["window_days"] = log.window.days;
  const auto users = actors(log);
  summary["actors"] = users.size();
  if (!o.profiles.empty() || !o.embeddings.empty()) {
    const auto providers = load_providers(o);
    run.input("profiles", o.profiles);
    run.input("embeddings", o.embeddings);
    summary["profiles"] = providers.profiles().size();
    summary["embeddings"] = providers.content_store().size();
  }
  const auto text = summary.dump(2) + "\n";
  out << text;
  if (!o.out.empty()) run.write("ingest.json", text);
  run.finish();
  return 0;
}

int cmd_estimate(const CommonOptions& o, const std::vector<std::string>& requested, std::ostream& out) {
  require(o.out, "--out");
  Run run("estimate", o);
  const auto log = load_events(o);
  const auto centrals = resolve_centrals(log, requested);
  const auto providers = load_providers(o);
  run.input("events", o.events);
  run.input("profiles", o.profiles);
  run.input("embeddings", o.embeddings);
  run.input("profile_embeddings", o.profile_embeddings);
  run.config()["central"] = centrals;

  const auto stars = extract_star_graphs(log, centrals);
  std::vector<ContagionReport> reports(stars.size());
  parallel_for(stars.size(), o.workers,
               [&](std::size_t i) { reports[i] = estimate_central_user(stars[i], providers); });
  std::ostringstream csv;
  write_report_csv(csv, reports);
  run.write("contagion.csv", csv.str());
  run.finish();
  out << "estimated " << reports.size() << " central user(s) -> "
      << (fs::path(o.out) / "contagion.csv").string() << '\n';
  return 0;
}

int cmd_report(const CommonOptions& o, const std::vector<std::string>& requested, std::ostream& out) {
  require(o.out, "--out");
  if (requested.empty()) throw Error(ErrorKind::Config, "missing required flag --central");
  Run run("report", o);
  const auto log = load_events(o);
  run.input("events", o.events);
  run.config()["central"] = requested;
  for (const auto& central : requested) {
    const auto days = daily_activity(log, central);
    std::ostringstream csv;
    write_activity_csv(csv, days);
    run.write("activity_" + central + ".csv", csv.str());
  }
  run.finish();
  out << "wrote " << requested.size() << " activity report(s) to " << o.out << '\n';
  return 0;
}

int cmd_scenario(const CommonOptions& o, SynthConfig base, const std::vector<std::string>& presets,
                 int trials, std::ostream& out) {
  Run run("scenario", o);
  base.seed = o.seed;
  base.validate();
  std::vector<Preset> chosen;
  if (presets.empty() || (presets.size() == 1 && presets[0] == "all")) {
    chosen.assign(kAllPresets.begin(), kAllPresets.end());
  } else {
    for (const auto& name : presets) {
      auto p = parse_preset(name);
      if (!p) throw Error(ErrorKind::Config, "unknown preset '" + name + "'");
      chosen.push_back(*p);
    }
  }
  run.config()["synth"] = synth_snapshot(base);
  run.config()["trials"] = trials;
  std::vector<std::string> names;
  for (Preset p : chosen) names.emplace_back(to_string(p));
  run.config()["presets"] = names;

  const auto results = run_scenarios(chosen, base, trials, o.workers);
  for (const auto& r : results) {
    out << r.preset << ": kappa " << format_double(r.baseline_metric) << " -> "
        << format_double(r.variant_metric) << " (" << format_double(r.pct_change) << "%, "
        << to_string(r.direction) << "); mean xi " << format_double(r.baseline_xi) << " -> "
        << format_double(r.variant_xi) << '\n';
  }
  if (!o.out.empty()) {
    std::ostringstream csv;
    write_scenario_csv(csv, results);
    run.write("scenario.csv", csv.str());
  }
  run.finish();
  return 0;
}

int cmd_synth(const CommonOptions& o, SynthConfig cfg, std::ostream& out) {
  require(o.out, "--out");
  cfg.seed = o.seed;
  cfg.validate();
  Run run("synth", o);
  run.config()["synth"] = synth_snapshot(cfg);
  const auto corpus = generate(cfg);
  std::ostringstream events, profiles, embeddings;
  write_events(events, corpus.events);
  write_profiles(profiles, corpus.profiles);
  write_embeddings(embeddings, corpus.embeddings);
  run.write("events.jsonl", events.str());
  run.write("profiles.jsonl", profiles.str());
  run.write("embeddings.jsonl", embeddings.str());
  run.finish();
  out << "generated " << corpus.events.size() << " events, " << corpus.profiles.size()
      << " profiles, " << corpus.embeddings.size() << " videos\n";
  return 0;
}

int cmd_bench(const CommonOptions& o, int repetitions, double cost_c, double cost_m, std::ostream& out) {
  require(o.events, "--events");
  require(o.profiles, "--profiles");
  require(o.embeddings, "--embeddings");
  Run run("bench", o);
  run.input("events", o.events);
  run.input("profiles", o.profiles);
  run.input("embeddings", o.embeddings);
  run.config()["repetitions"] = repetitions;
  const auto report = run_local_bench({o.events, o.profiles, o.embeddings, o.parse_options()},
                                      repetitions, o.workers);
  const double c = cost_c > 0 ? cost_c : static_cast<double>(std::max<std::size_t>(report.central_users, 1));
  const double m = cost_m > 0 ? cost_m
                              : std::max(1.0, static_cast<double>(report.edges) /
                                                  static_cast<double>(std::max<std::size_t>(report.central_users, 1)));
  const auto cost = cost_model(c, m, reference_units());
  ordered_json cj;
  cj["central_users"] = c;
  cj["avg_neighbors"] = m;
  cj["global_compute_seconds"] = cost.global_compute_seconds;
  cj["global_storage_bytes"] = cost.global_storage_bytes;
  cj["local_compute_seconds"] = cost.local_compute_seconds;
  cj["local_storage_bytes"] = cost.local_storage_bytes;
  cj["reduction_factor"] = cost.reduction_factor;
  cj["storage_reduction_factor"] = cost.storage_reduction_factor;

  out << "workers " << report.workers << ", " << report.events << " events, " << report.central_users
      << " central users, " << report.edges << " edges\n";
  for (const auto& [phase, ms] : report.median_wall_ms)
    out << "  " << phase << ": median " << format_double(ms) << " ms\n";
  out << "  peak memory " << report.peak_mem_bytes << " bytes\n";
  if (!o.out.empty()) {
    std::ostringstream csv;
    write_bench_csv(csv, report);
    run.write("bench.csv", csv.str());
    run.write("cost_model.json", cj.dump(2) + "\n");
  }
  run.finish();
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Emotion contagion estimation on localized star graphs", "contagion"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonOptions common;
  SynthConfig synth_cfg;
  std::vector<std::string> central;
  std::vector<std::string> presets;
  int trials = 20;
  int repetitions = 3;
  double cost_c = 0;
  double cost_m = 0;

  auto* ingest = app.add_subcommand("ingest", "Validate input files and summarize them");
  add_common(ingest, common);
  auto* estimate = app.add_subcommand("estimate", "Estimate contagion per central user");
  add_common(estimate, common);
  estimate->add_option("--central", central, "Central user id (repeatable; default all actors)");
  auto* report = app.add_subcommand("report", "Daily activity of central users");
  add_common(report, common);
  report->add_option("--central", central, "Central user id (repeatable)");
  auto* scenario = app.add_subcommand("scenario", "Paired synthetic scenario experiments");
  add_common(scenario, common);
  add_synth_options(scenario, synth_cfg);
  scenario->add_option("--preset", presets, "Preset name or 'all'");
  scenario->add_option("--trials", trials, "Paired trials per preset")->check(CLI::PositiveNumber);
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  add_common(synth, common);
  add_synth_options(synth, synth_cfg);
  auto* bench = app.add_subcommand("bench", "Benchmark the local estimator and model global cost");
  add_common(bench, common);
  bench->add_option("--repetitions", repetitions, "Repetitions per phase")->check(CLI::PositiveNumber);
  bench->add_option("--cost-central", cost_c, "C for the cost model (default: corpus)");
  bench->add_option("--cost-neighbors", cost_m, "M for the cost model (default: corpus)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "contagion: " << e.what() << '\n';
    return 4;
  }

  try {
    if (*ingest) return cmd_ingest(common, out);
    if (*estimate) return cmd_estimate(common, central, out);
    if (*report) return cmd_report(common, central, out);
    if (*scenario) return cmd_scenario(common, synth_cfg, presets, trials, out);
    if (*synth) return cmd_synth(common, synth_cfg, out);
    if (*bench) return cmd_bench(common, repetitions, cost_c, cost_m, out);
  } catch (const Error& e) {
    err << "contagion: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "contagion: " << e.what() << '\n';
    return 1;
  }
  return 4;
}

}  // namespace contagion
