#include "ddsgps/graph.hpp"

#include "ddsgps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ddsgps {

DigraphSnapshot::DigraphSnapshot(std::size_t m, std::vector<Edge> edges) : m_(m), edges_(std::move(edges)) {
  if (m_ == 0) throw ConfigError("graph: agent count must be positive");
  for (const auto& e : edges_) {
    if (e.from >= m_ || e.to >= m_) {
      throw ConfigError("graph: edge " + std::to_string(e.from + 1) + "->" + std::to_string(e.to + 1) +
                        " outside 1.." + std::to_string(m_));
    }
  }
  std::erase_if(edges_, [](const Edge& e) { return e.from == e.to; });
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

std::size_t out_degree(const DigraphSnapshot& snap, std::size_t j) {
  if (j >= snap.size()) throw std::out_of_range("out_degree: agent index out of range");
  const auto n = std::count_if(snap.edges().begin(), snap.edges().end(), [j](const Edge& e) { return e.from == j; });
  return 1 + static_cast<std::size_t>(n);
}

WeightMatrix build_weights(const DigraphSnapshot& snap) {
  const auto m = static_cast<Eigen::Index>(snap.size());
  std::vector<std::size_t> degree(snap.size(), 1);
  for (const auto& e : snap.edges()) ++degree[e.from];

  WeightMatrix w = WeightMatrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) w(j, j) = 1.0 / static_cast<double>(degree[static_cast<std::size_t>(j)]);
  for (const auto& e : snap.edges()) {
    w(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from)) = 1.0 / static_cast<double>(degree[e.from]);
  }
  return w;
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Static: return "static";
    case ScheduleKind::RingRotation: return "ring-rotation";
    case ScheduleKind::RandomWindow: return "random-window";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "static") return ScheduleKind::Static;
  if (name == "ring-rotation") return ScheduleKind::RingRotation;
  if (name == "random-window") return ScheduleKind::RandomWindow;
  throw ConfigError("unknown schedule kind '" + std::string(name) + "'");
}

namespace {

std::vector<Edge> ring_edges(std::size_t m) {
  std::vector<Edge> edges;
  if (m < 2) return edges;
  for (std::size_t i = 0; i < m; ++i) edges.push_back({i, (i + 1) % m});
  return edges;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Unbiased draw in [0, n). std::uniform_int_distribution is not portable
// across standard libraries, and schedules must replay bit-for-bit.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return static_cast<std::size_t>(r % bound);
}

std::vector<Edge> random_window_slot(std::size_t m, std::size_t window, std::uint64_t seed, std::uint64_t t) {
  if (m < 2) return {};
  const std::uint64_t k = t / window;
  const std::size_t slot = static_cast<std::size_t>(t % window);
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(k)));

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = m - 1; i > 0; --i) std::swap(order[i], order[draw_index(rng, i + 1)]);

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    const Edge cycle_edge{order[i], order[(i + 1) % m]};
    if (draw_index(rng, window) == slot) edges.push_back(cycle_edge);
  }
  for (std::size_t s = 0; s < window; ++s) {
    const std::size_t extra = draw_index(rng, m + 1);
    for (std::size_t e = 0; e < extra; ++e) {
      const std::size_t from = draw_index(rng, m);
      std::size_t to = draw_index(rng, m - 1);
      if (to >= from) ++to;
      if (s == slot) edges.push_back({from, to});
    }
  }
  return edges;
}

}  // namespace

GraphSchedule::GraphSchedule(ScheduleKind kind, std::size_t m, std::size_t window, std::uint64_t seed,
                             DigraphSnapshot fixed)
    : kind_(kind), m_(m), window_(window), seed_(seed), fixed_(std::move(fixed)) {
  if (window_ == 0) throw ConfigError("schedule: window length B must be positive");
}

GraphSchedule GraphSchedule::static_ring(std::size_t m) {
  return {ScheduleKind::Static, m, 1, 0, DigraphSnapshot(m, ring_edges(m))};
}

GraphSchedule GraphSchedule::static_edges(std::size_t m, std::vector<Edge> edges) {
  return {ScheduleKind::Static, m, 1, 0, DigraphSnapshot(m, std::move(edges))};
}

GraphSchedule GraphSchedule::ring_rotation(std::size_t m) {
  return {ScheduleKind::RingRotation, m, m, 0, DigraphSnapshot(m)};
}

GraphSchedule GraphSchedule::random_window(std::size_t m, std::size_t window, std::uint64_t seed) {
  return {ScheduleKind::RandomWindow, m, window, seed, DigraphSnapshot(m)};
}

DigraphSnapshot GraphSchedule::snapshot(std::uint64_t t) const {
  switch (kind_) {
    case ScheduleKind::Static:
      return fixed_;
    case ScheduleKind::RingRotation: {
      if (m_ < 2) return DigraphSnapshot(m_);
      const auto from = static_cast<std::size_t>(t % m_);
      return DigraphSnapshot(m_, {{from, (from + 1) % m_}});
    }
    case ScheduleKind::RandomWindow:
      return DigraphSnapshot(m_, random_window_slot(m_, window_, seed_, t));
  }
  return fixed_;
}

std::vector<std::size_t> strongly_connected_components(const DigraphSnapshot& graph, std::size_t* count) {
  const std::size_t m = graph.size();
  std::vector<std::vector<std::size_t>> adj(m);
  for (const auto& e : graph.edges()) adj[e.from].push_back(e.to);

  constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(m, unvisited), low(m, 0), comp(m, unvisited);
  std::vector<bool> on_stack(m, false);
  std::vector<std::size_t> stack;
  std::size_t next_index = 0, next_comp = 0;

  // Iterative Tarjan: frames hold (vertex, next adjacency position).
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = 0; root < m; ++root) {
    if (index[root] != unvisited) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < adj[v].size()) {
        const std::size_t w = adj[v][pos++];
        if (index[w] == unvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != done);
        ++next_comp;
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

bool is_strongly_connected(const DigraphSnapshot& graph) {
  std::size_t count = 0;
  strongly_connected_components(graph, &count);
  return count == 1;
}

bool check_b_strong_connectivity(const GraphSchedule& sched, std::size_t window, std::uint64_t horizon) {
  return check_b_strong_connectivity([&sched](std::uint64_t t) { return sched.snapshot(t); }, sched.size(), window,
                                     horizon);
}

bool check_b_strong_connectivity(const std::function<DigraphSnapshot(std::uint64_t)>& snapshot, std::size_t m,
                                 std::size_t window, std::uint64_t horizon) {
  if (window == 0) throw ConfigError("B-connectivity: window must be positive");
  if (horizon < window) throw ConfigError("B-connectivity: horizon must be at least B");
  for (std::uint64_t start = 0; start + window <= horizon; start += window) {
    std::vector<Edge> all;
    for (std::uint64_t t = start; t < start + window; ++t) {
      const auto snap = snapshot(t);
      if (snap.size() != m) throw ConfigError("B-connectivity: snapshot size differs from m");
      all.insert(all.end(), snap.edges().begin(), snap.edges().end());
    }
    if (!is_strongly_connected(DigraphSnapshot(m, std::move(all)))) return false;
  }
  return true;
}

double worst_case_xi(std::size_t m, std::size_t window) {
  const double exponent = static_cast<double>(m) * static_cast<double>(window);
  return std::exp(-exponent * std::log(static_cast<double>(m)));
}

double worst_case_one_minus_eta(std::size_t m, std::size_t window) {
  const double exponent = static_cast<double>(m) * static_cast<double>(window);
  return -std::expm1(std::log1p(-worst_case_xi(m, window)) / exponent);
}

double worst_case_eta(std::size_t m, std::size_t window) {
  return 1.0 - worst_case_one_minus_eta(m, window);
}

}  // namespace ddsgps
