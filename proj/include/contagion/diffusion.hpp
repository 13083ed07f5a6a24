#pragma once

// Per-edge inflow/outflow estimation on a localized star graph and the
// global Laplacian diffusion it localizes.

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "contagion/model.hpp"
#include "contagion/similarity.hpp"

namespace contagion {

// Tr(sqrt(A)^T sqrt(A)) with an entrywise square root, i.e. the sum of all
// entries. Accumulated topic-major, day-minor.
double trace_sum(const HistoryMatrix& a);

double inflow(const HistoryMatrix& watch);

struct CreateFactors {
  double delta_c = 0.0;
  double delta_e = 0.5;
};

// Semantic and sentiment factors of a Create against the videos watched on
// the same edge up to and including the creation day. With no such videos
// the factors are (0, 1/2).
CreateFactors create_factors(const ActionRecord& create, const EdgeHistories& edge,
                             const SimilarityProviders& providers);

// One engagement term e^{-age} * delta_f * delta_c * delta_e.
double gamma_term(const ActionRecord& action, const EdgeHistories& edge,
                  const SimilarityProviders& providers);

// Sum of gamma_term over one (topic, day) cell.
double gamma(std::span<const ActionRecord> cell, const EdgeHistories& edge,
             const SimilarityProviders& providers);

// U[s][d] = gamma(cell(s, d)).
HistoryMatrix action_matrix(const EdgeHistories& edge, const SimilarityProviders& providers);

// max(p_i . p_c, 0) * trace_sum(U).
double outflow(const HistoryMatrix& actions, const ProfileEmbedding& central,
               const ProfileEmbedding& neighbor);

struct TopicFlows {
  TopicId topic;
  double inflow = 0.0;
  double outflow = 0.0;
  double xi = 0.0;
};

struct EdgeFlows {
  double inflow = 0.0;
  double outflow = 0.0;
  double xi = 0.0;
  std::vector<TopicFlows> per_topic;  // matrix row order
};

// Totals are the sums of the per-topic rows, so inflow = sum of per-topic
// inflows holds exactly. Throws Error(Shape) when W and U disagree on
// topics or window.
EdgeFlows edge_xi(const HistoryMatrix& watch, const HistoryMatrix& actions,
                  const ProfileEmbedding& central, const ProfileEmbedding& neighbor);

struct NeighborFlows {
  UserId neighbor;
  EdgeFlows flows;
};

struct ContagionReport {
  UserId central;
  std::vector<NeighborFlows> edges;  // same order as the star graph
  double total_inflow = 0.0;
  double total_outflow = 0.0;
  double total_xi = 0.0;

  const EdgeFlows* find(std::string_view neighbor) const;
};

EdgeFlows estimate_edge(const StarGraph& star, const StarEdge& edge,
                        const SimilarityProviders& providers);

// Edges are independent; workers > 1 evaluates them on a thread pool. The
// result is bitwise identical for any worker count.
ContagionReport estimate_central_user(const StarGraph& star, const SimilarityProviders& providers,
                                      unsigned workers = 1);

// CSV `central,neighbor,topic,inflow,outflow,xi`. Topic rows with no flow
// are omitted; each neighbor gets a `topic = *` aggregate and each central
// user a `neighbor = *` aggregate.
void write_report_csv(std::ostream& out, std::span<const ContagionReport> reports,
                      bool header = true);

// Shortest round-trip decimal form of a double.
std::string format_double(double value);

// ---- global diffusion -----------------------------------------------------

// Dense weighted digraph with a scalar state per node. weight(i, j) is the
// velocity from i towards j; it need not be symmetric.
class DiffusionGraph {
 public:
  DiffusionGraph(std::size_t nodes, std::vector<double> weights, std::vector<double> state);

  std::size_t size() const { return nodes_; }
  double weight(std::size_t i, std::size_t j) const { return weights_[i * nodes_ + j]; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> state() const { return state_; }
  double max_row_sum() const;

  DiffusionGraph with_state(std::vector<double> state) const;

 private:
  std::size_t nodes_;
  std::vector<double> weights_;
  std::vector<double> state_;
};

// -(D - A) Phi with A = T and D = diag(row sums of T).
std::vector<double> laplacian_rate(const DiffusionGraph& g);

// Explicit Euler step Phi' = Phi - dt (D - A) Phi. Throws Error(Parameter)
// unless dt > 0 and dt * max row sum <= 1.
DiffusionGraph laplacian_step(const DiffusionGraph& g, double dt);

// Speed-matching balance per node: sum_j Phi_j T_ji - sum_j Phi_i T_ij, the
// flow arriving from every source minus the flow leaving along every edge.
std::vector<double> speed_matching_rate(const DiffusionGraph& g);

}  // namespace contagion
