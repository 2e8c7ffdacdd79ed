#include "krivine/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "krivine/numerics.hpp"

namespace krivine {

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges) : n_(n), adj_(n) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  edges_.reserve(edges.size());
  for (Edge e : edges) {
    if (e.i == e.j) throw std::invalid_argument("graph: self-loop at vertex " + std::to_string(e.i));
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.j >= n_) throw std::invalid_argument("graph: vertex index out of range");
    if (!std::isfinite(e.w) || e.w < 0.0) {
      throw std::invalid_argument("graph: weights must be finite and nonnegative");
    }
    if (!seen.emplace(e.i, e.j).second) {
      throw std::invalid_argument("graph: duplicate edge (" + std::to_string(e.i) + ", " +
                                  std::to_string(e.j) + ")");
    }
    edges_.push_back(e);
    adj_[e.i].push_back({e.j, e.w});
    adj_[e.j].push_back({e.i, e.w});
  }
}

double WeightedGraph::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.w;
  return s;
}

WeightedGraph parse_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::size_t n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    long long i = 0, j = 0;
    double w = 0.0;
    std::string extra;
    if (!(row >> i >> j >> w) || (row >> extra)) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": expected `i j w`");
    }
    if (i < 0 || j < 0) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": negative vertex index");
    }
    edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w});
    n = std::max({n, static_cast<std::size_t>(i) + 1, static_cast<std::size_t>(j) + 1});
  }
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path.string());
  return parse_edge_list(in);
}

WeightedGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
  const RngStream stream{seed, 0, 0};
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (stream.uniform_at(i * n + j) < p) edges.push_back({i, j, 1.0});
    }
  }
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph cycle_graph(std::size_t n, double w) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, w});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph complete_graph(std::size_t n, double w) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, w});
  }
  return WeightedGraph(n, std::move(edges));
}

}  // namespace krivine
