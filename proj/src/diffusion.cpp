#include "contagion/diffusion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "contagion/error.hpp"
#include "contagion/parallel.hpp"

namespace contagion {

namespace {

double row_total(std::span<const double> row) {
  double sum = 0.0;
  for (double x : row) sum += x;
  return sum;
}

}  // namespace

double trace_sum(const HistoryMatrix& a) {
  double total = 0.0;
  for (std::size_t s = 0; s < a.rows(); ++s) {
    const auto row = a.row(s);
    if (std::any_of(row.begin(), row.end(), [](double x) { return !(x >= 0.0); }))
      throw Error(ErrorKind::Domain, "trace sum requires nonnegative entries");
    total += row_total(row);
  }
  return total;
}

double inflow(const HistoryMatrix& watch) { return trace_sum(watch); }

CreateFactors create_factors(const ActionRecord& create, const EdgeHistories& edge,
                             const SimilarityProviders& providers) {
  std::vector<WatchedVideo> watched;
  std::vector<int> sentiments;
  for (const auto& w : edge.watched) {
    if (w.event_day > create.event_day) break;  // chronological
    watched.push_back({w.video, create.event_day - w.event_day});
    sentiments.push_back(providers.content(w.video).sentiment);
  }
  if (watched.empty()) return {};
  return {delta_c(create.video, watched, providers),
          delta_e(providers.content(create.video).sentiment, sentiments)};
}

double gamma_term(const ActionRecord& action, const EdgeHistories& edge,
                  const SimilarityProviders& providers) {
  if (!is_engagement(action.kind)) return 0.0;
  if (action.age() < 0) throw Error(ErrorKind::Data, "negative age for video " + action.video);
  const double decay = std::exp(-static_cast<double>(action.age()));
  const double follow = edge.follow_state.followed_on(action.event_day) ? 1.0 : 0.5;
  if (action.kind != ActionKind::Create) return decay * follow;
  const auto f = create_factors(action, edge, providers);
  return decay * follow * f.delta_c * f.delta_e;
}

double gamma(std::span<const ActionRecord> cell, const EdgeHistories& edge,
             const SimilarityProviders& providers) {
  double total = 0.0;
  for (const auto& action : cell) total += gamma_term(action, edge, providers);
  return total;
}

HistoryMatrix action_matrix(const EdgeHistories& edge, const SimilarityProviders& providers) {
  HistoryMatrix u(edge.watch.topics(), static_cast<int>(edge.watch.cols()));
  for (std::size_t s = 0; s < u.rows(); ++s) {
    for (std::size_t d = 0; d < u.cols(); ++d) {
      const auto cell = edge.cell(s, d);
      if (!cell.empty()) u.set(s, d, gamma(cell, edge, providers));
    }
  }
  return u;
}

double outflow(const HistoryMatrix& actions, const ProfileEmbedding& central,
               const ProfileEmbedding& neighbor) {
  const double similarity = std::max(profile_similarity(neighbor, central), 0.0);
  return similarity * trace_sum(actions);
}

EdgeFlows edge_xi(const HistoryMatrix& watch, const HistoryMatrix& actions,
                  const ProfileEmbedding& central, const ProfileEmbedding& neighbor) {
  if (!watch.same_shape(actions))
    throw Error(ErrorKind::Shape, "watch and action matrices differ in topics or window");
  const double similarity = std::max(profile_similarity(neighbor, central), 0.0);
  // Validates nonnegativity of both matrices.
  trace_sum(watch);
  trace_sum(actions);
  EdgeFlows flows;
  flows.per_topic.reserve(watch.rows());
  for (std::size_t s = 0; s < watch.rows(); ++s) {
    TopicFlows t{watch.topics()[s], row_total(watch.row(s)), similarity * row_total(actions.row(s)), 0.0};
    t.xi = t.inflow - t.outflow;
    flows.inflow += t.inflow;
    flows.outflow += t.outflow;
    flows.per_topic.push_back(std::move(t));
  }
  flows.xi = flows.inflow - flows.outflow;
  return flows;
}

const EdgeFlows* ContagionReport::find(std::string_view neighbor) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), neighbor,
                             [](const NeighborFlows& e, std::string_view id) { return e.neighbor < id; });
  if (it == edges.end() || it->neighbor != neighbor) return nullptr;
  return &it->flows;
}

EdgeFlows estimate_edge(const StarGraph& star, const StarEdge& edge,
                        const SimilarityProviders& providers) {
  const auto& central = providers.profile_embedding(star.central);
  const auto& neighbor = providers.profile_embedding(edge.neighbor);
  const auto u = action_matrix(edge.histories, providers);
  return edge_xi(edge.histories.watch, u, central, neighbor);
}

ContagionReport estimate_central_user(const StarGraph& star, const SimilarityProviders& providers,
                                      unsigned workers) {
  ContagionReport report;
  report.central = star.central;
  report.edges.resize(star.edges.size());
  // Resolve the central profile up front so a missing one fails uniformly.
  providers.profile_embedding(star.central);

  parallel_for(star.edges.size(), workers, [&](std::size_t i) {
    report.edges[i] = {star.edges[i].neighbor, estimate_edge(star, star.edges[i], providers)};
  });

  for (const auto& e : report.edges) {
    report.total_inflow += e.flows.inflow;
    report.total_outflow += e.flows.outflow;
  }
  report.total_xi = report.total_inflow - report.total_outflow;
  return report;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_report_csv(std::ostream& out, std::span<const ContagionReport> reports, bool header) {
  if (header) out << "central,neighbor,topic,inflow,outflow,xi\n";
  auto row = [&](std::string_view c, std::string_view n, std::string_view t, double i, double o, double x) {
    out << c << ',' << n << ',' << t << ',' << format_double(i) << ',' << format_double(o) << ','
        << format_double(x) << '\n';
  };
  for (const auto& r : reports) {
    for (const auto& e : r.edges) {
      for (const auto& t : e.flows.per_topic) {
        if (t.inflow != 0.0 || t.outflow != 0.0) row(r.central, e.neighbor, t.topic, t.inflow, t.outflow, t.xi);
      }
      row(r.central, e.neighbor, "*", e.flows.inflow, e.flows.outflow, e.flows.xi);
    }
    row(r.central, "*", "*", r.total_inflow, r.total_outflow, r.total_xi);
  }
}

// ---- global diffusion -----------------------------------------------------

DiffusionGraph::DiffusionGraph(std::size_t nodes, std::vector<double> weights, std::vector<double> state)
    : nodes_(nodes), weights_(std::move(weights)), state_(std::move(state)) {
  if (weights_.size() != nodes_ * nodes_ || state_.size() != nodes_)
    throw Error(ErrorKind::Shape, "diffusion graph needs an n x n weight matrix and n states");
  for (std::size_t i = 0; i < nodes_; ++i) {
    for (std::size_t j = 0; j < nodes_; ++j) {
      const double w = weight(i, j);
      if (!(w >= 0.0) || !std::isfinite(w))
        throw Error(ErrorKind::Domain, "edge weights must be finite and nonnegative");
      if (i == j && w != 0.0) throw Error(ErrorKind::Domain, "weight matrix must have a zero diagonal");
    }
  }
}

double DiffusionGraph::max_row_sum() const {
  double best = 0.0;
  for (std::size_t i = 0; i < nodes_; ++i)
    best = std::max(best, row_total({weights_.data() + i * nodes_, nodes_}));
  return best;
}

DiffusionGraph DiffusionGraph::with_state(std::vector<double> state) const {
  return DiffusionGraph(nodes_, weights_, std::move(state));
}

std::vector<double> laplacian_rate(const DiffusionGraph& g) {
  const std::size_t n = g.size();
  const auto phi = g.state();
  std::vector<double> rate(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    double adjacency = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      degree += g.weight(i, j);
      adjacency += g.weight(i, j) * phi[j];
    }
    rate[i] = -(degree * phi[i] - adjacency);
  }
  return rate;
}

DiffusionGraph laplacian_step(const DiffusionGraph& g, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Parameter, "time step must be positive");
  if (dt * g.max_row_sum() > 1.0)
    throw Error(ErrorKind::Parameter, "time step violates dt * max row sum <= 1");
  const auto rate = laplacian_rate(g);
  std::vector<double> next(g.state().begin(), g.state().end());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * rate[i];
  return g.with_state(std::move(next));
}

std::vector<double> speed_matching_rate(const DiffusionGraph& g) {
  const std::size_t n = g.size();
  const auto phi = g.state();
  std::vector<double> rate(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double in = 0.0;
    double out = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      in += phi[j] * g.weight(j, i);
      out += phi[i] * g.weight(i, j);
    }
    rate[i] = in - out;
  }
  return rate;
}

}  // namespace contagion
