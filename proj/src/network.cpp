#include "spectranet/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <tuple>

#include "csv.hpp"
#include "spectranet/errors.hpp"

namespace spectranet {

DistanceMatrix distance(const CorrelationMatrix& c) {
  const std::size_t n = c.n();
  DistanceMatrix d{Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double radicand = 1.0 - c.values(i, j);
      if (radicand < 0.0 && radicand > -1e-12) radicand = 0.0;
      const double dist = std::sqrt(2.0 * radicand);
      d.values(i, j) = d.values(j, i) = dist;
    }
  }
  return d;
}

double SpanningTree::total_weight() const {
  double sum = 0.0;
  for (const auto& e : edges) sum += e.weight;
  return sum;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

std::size_t UnionFind::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

bool is_spanning_tree(const SpanningTree& t) {
  if (t.n == 0 || t.edges.size() != t.n - 1) return false;
  UnionFind uf(t.n);
  for (const auto& e : t.edges) {
    if (e.i >= e.j || e.j >= t.n) return false;
    if (!uf.unite(e.i, e.j)) return false;
  }
  return true;
}

SpanningTree mst_kruskal(const DistanceMatrix& d) {
  const std::size_t n = d.n();
  if (n < 2 || !d.values.is_square()) throw InputError("mst_kruskal: need a square matrix with N >= 2");

  std::vector<Edge> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) candidates.push_back({i, j, d.values(i, j)});
  std::sort(candidates.begin(), candidates.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.weight, a.i, a.j) < std::tie(b.weight, b.i, b.j);
  });

  SpanningTree tree{n, {}};
  tree.edges.reserve(n - 1);
  UnionFind uf(n);
  for (const auto& e : candidates) {
    if (uf.unite(e.i, e.j)) {
      tree.edges.push_back(e);
      if (tree.edges.size() == n - 1) break;
    }
  }
  return tree;
}

std::size_t DegreeSequence::max() const {
  return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
}

std::size_t DegreeSequence::min() const {
  return degrees.empty() ? 0 : *std::min_element(degrees.begin(), degrees.end());
}

DegreeSequence degrees(const SpanningTree& t) {
  DegreeSequence seq{std::vector<std::size_t>(t.n, 0)};
  for (const auto& e : t.edges) {
    ++seq.degrees[e.i];
    ++seq.degrees[e.j];
  }
  return seq;
}

std::vector<std::vector<std::size_t>> adjacency(const SpanningTree& t) {
  std::vector<std::vector<std::size_t>> adj(t.n);
  for (const auto& e : t.edges) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

std::vector<std::size_t> neighbors(const SpanningTree& t, std::size_t j) {
  if (j >= t.n) {
    throw InputError("neighbors: node " + std::to_string(j) + " out of range for " +
                     std::to_string(t.n) + " nodes");
  }
  std::vector<std::size_t> out;
  for (const auto& e : t.edges) {
    if (e.i == j) out.push_back(e.j);
    if (e.j == j) out.push_back(e.i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_tree_csv(std::ostream& out, const SpanningTree& t,
                    const std::vector<std::string>& tickers) {
  if (tickers.size() != t.n) throw InputError("write_tree_csv: one ticker per node required");
  out << "i,j,ticker_i,ticker_j,weight\n";
  for (const auto& e : t.edges) {
    out << e.i << ',' << e.j << ',' << detail::csv_field(tickers[e.i]) << ','
        << detail::csv_field(tickers[e.j]) << ',' << format_double(e.weight) << '\n';
  }
}

}  // namespace spectranet
