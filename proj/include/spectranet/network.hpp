#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "spectranet/matrix.hpp"
#include "spectranet/spectral.hpp"

namespace spectranet {

/// Symmetric, zero diagonal, entries in [0, 2].
struct DistanceMatrix {
  Matrix values;

  std::size_t n() const { return values.rows(); }
};

/// d_ij = sqrt(2 (1 - rho_ij)). Radicands within 1e-12 below zero are
/// treated as zero.
DistanceMatrix distance(const CorrelationMatrix& c);

struct Edge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// N - 1 edges sorted by (weight, i, j).
struct SpanningTree {
  std::size_t n = 0;
  std::vector<Edge> edges;

  double total_weight() const;
};

/// Returns true iff t has n - 1 edges with i < j < n that connect all nodes
/// without a cycle (checked by replaying them through a union-find).
bool is_spanning_tree(const SpanningTree& t);

/// Disjoint sets with path compression and union by rank.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t x);
  /// Merges the sets of a and b; false if they were already joined.
  bool unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

/// Kruskal's algorithm over all N(N-1)/2 pairs, considered in ascending
/// (weight, i, j) order. Equal weights therefore resolve towards lower node
/// indices, which matters for rank-deficient reconstructions.
SpanningTree mst_kruskal(const DistanceMatrix& d);

struct DegreeSequence {
  std::vector<std::size_t> degrees;

  std::size_t max() const;
  std::size_t min() const;
};

DegreeSequence degrees(const SpanningTree& t);

/// Sorted neighbor list of node j.
std::vector<std::size_t> neighbors(const SpanningTree& t, std::size_t j);

/// Sorted neighbor lists of every node.
std::vector<std::vector<std::size_t>> adjacency(const SpanningTree& t);

/// Edge list CSV `i,j,ticker_i,ticker_j,weight`, rows in tree order.
void write_tree_csv(std::ostream& out, const SpanningTree& t,
                    const std::vector<std::string>& tickers);

}  // namespace spectranet
