#pragma once

// Time-varying directed communication graphs and their push-sum weights.
//
// Agents are 0-based in this API. Every agent is implicitly its own in- and
// out-neighbour, so self-loops are never stored.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ddsgps {

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// One round's graph. Edges are kept sorted and unique; self-loops are
/// dropped on construction.
class DigraphSnapshot {
 public:
  explicit DigraphSnapshot(std::size_t m, std::vector<Edge> edges = {});

  std::size_t size() const { return m_; }
  const std::vector<Edge>& edges() const { return edges_; }

  friend bool operator==(const DigraphSnapshot&, const DigraphSnapshot&) = default;

 private:
  std::size_t m_;
  std::vector<Edge> edges_;
};

/// d_j = |N_j^out|, counting the implicit self-loop.
std::size_t out_degree(const DigraphSnapshot& snap, std::size_t j);

/// Column-stochastic mixing matrix: entry (i, j) is 1/d_j when j pushes to i
/// (including i == j), zero otherwise.
using WeightMatrix = Eigen::MatrixXd;

WeightMatrix build_weights(const DigraphSnapshot& snap);

enum class ScheduleKind { Static, RingRotation, RandomWindow };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

/// Deterministic generator of the snapshot used at each round t.
///
///   Static        fixed edges (a directed ring i -> i+1 unless given)
///   RingRotation  the single edge (t mod m) -> (t+1 mod m)
///   RandomWindow  per window of `window` rounds, a random directed
///                 Hamiltonian cycle is scattered across the window's
///                 snapshots plus random extra edges; seeded by (seed, window)
class GraphSchedule {
 public:
  static GraphSchedule static_ring(std::size_t m);
  static GraphSchedule static_edges(std::size_t m, std::vector<Edge> edges);
  static GraphSchedule ring_rotation(std::size_t m);
  static GraphSchedule random_window(std::size_t m, std::size_t window, std::uint64_t seed);

  ScheduleKind kind() const { return kind_; }
  std::size_t size() const { return m_; }
  /// Window length B for which the schedule is built to be B-strongly connected.
  std::size_t window() const { return window_; }
  std::uint64_t seed() const { return seed_; }
  /// Explicit edges of a static schedule.
  const std::vector<Edge>& static_edge_list() const { return fixed_.edges(); }

  DigraphSnapshot snapshot(std::uint64_t t) const;

 private:
  GraphSchedule(ScheduleKind kind, std::size_t m, std::size_t window, std::uint64_t seed,
                DigraphSnapshot fixed);

  ScheduleKind kind_;
  std::size_t m_;
  std::size_t window_;
  std::uint64_t seed_;
  DigraphSnapshot fixed_;
};

/// Strongly connected components (Tarjan). Returns the component id of each
/// vertex; ids are 0..count-1.
std::vector<std::size_t> strongly_connected_components(const DigraphSnapshot& graph, std::size_t* count = nullptr);

bool is_strongly_connected(const DigraphSnapshot& graph);

/// True iff for every k with kB + B - 1 < horizon the union of snapshots
/// kB .. kB+B-1 is strongly connected.
bool check_b_strong_connectivity(const GraphSchedule& sched, std::size_t window, std::uint64_t horizon);

/// Same check for an arbitrary snapshot generator on m agents.
bool check_b_strong_connectivity(const std::function<DigraphSnapshot(std::uint64_t)>& snapshot, std::size_t m,
                                 std::size_t window, std::uint64_t horizon);

/// Worst-case mixing constants for a B-strongly connected sequence on m
/// agents: xi = m^{-mB} and eta = (1 - m^{-mB})^{1/(mB)}.
double worst_case_xi(std::size_t m, std::size_t window);
double worst_case_eta(std::size_t m, std::size_t window);
/// 1 - eta, computed without cancellation.
double worst_case_one_minus_eta(std::size_t m, std::size_t window);

}  // namespace ddsgps
