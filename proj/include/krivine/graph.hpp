#ifndef KRIVINE_GRAPH_HPP
#define KRIVINE_GRAPH_HPP

#include <cstdint>
#include <filesystem>
#include <istream>
#include <vector>

namespace krivine {

struct Edge {
  std::size_t i;
  std::size_t j;
  double w;
};

/// Undirected graph with nonnegative weights. Edges are stored with i < j and
/// at most one edge per pair.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Edges may be given in either orientation. Throws std::invalid_argument for
  /// self-loops, out-of-range endpoints, duplicate pairs, or negative or
  /// non-finite weights.
  WeightedGraph(std::size_t n, std::vector<Edge> edges);

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] double total_weight() const;

  struct Neighbor {
    std::size_t v;
    double w;
  };
  [[nodiscard]] const std::vector<std::vector<Neighbor>>& adjacency() const { return adj_; }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adj_;
};

/// Edge list: one `i j w` triple per line, 0-based, '#' starts a comment.
/// The vertex count is one more than the largest index mentioned.
WeightedGraph parse_edge_list(std::istream& in);
WeightedGraph load_edge_list(const std::filesystem::path& path);

/// G(n, p) with unit weights; edge (i, j) is kept when the uniform at counter
/// i * n + j of stream (seed, 0) is below p.
WeightedGraph random_graph(std::size_t n, double p, std::uint64_t seed);

WeightedGraph cycle_graph(std::size_t n, double w = 1.0);
WeightedGraph complete_graph(std::size_t n, double w = 1.0);

}  // namespace krivine

#endif  // KRIVINE_GRAPH_HPP
