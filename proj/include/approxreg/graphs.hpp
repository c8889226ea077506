#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "approxreg/selection.hpp"

namespace approxreg {

struct DirectedEdge {
  Index from = 0;  // regressed node
  Index to = 0;    // selected covariate
  double p_gauss = 1.0;
};

// Edges are sorted by (from, to); undirected pairs have a < b.
struct DependencyGraph {
  std::size_t nodes = 0;
  std::vector<DirectedEdge> directed;
  std::vector<std::pair<Index, Index>> undirected;
};

// Regresses every column of x on all the others with f1st and records an edge
// from the regressed node to each covariate of its approximation. The
// undirected graph joins a and b when either direction is present. Nodes run
// in parallel up to cfg.threads.
DependencyGraph fgr1st(const Eigen::MatrixXd& x, const SelectionConfig& cfg);

void write_directed_edges(std::ostream& out, const DependencyGraph& g);
void write_undirected_edges(std::ostream& out, const DependencyGraph& g);

// Random sparse Gaussian graphical model following Meinshausen and Buhlmann
// (2006): nodes uniform on the unit square, each pair joined with probability
// phi(d / sqrt(q)), then random edges removed until no node has degree above
// max_degree (edges joining two over-bound nodes go first). The precision
// matrix has unit diagonal and `partial` on every edge; observations are drawn
// from N(0, precision^-1).
struct RandomGraphFixture {
  Eigen::MatrixXd x;  // n x q
  std::vector<std::pair<Index, Index>> edges;  // true undirected edges, a < b
};

RandomGraphFixture meinshausen_buhlmann_graph(std::size_t n, std::size_t q, std::uint64_t seed,
                                              std::size_t max_degree = 4, double partial = 0.245);

struct EdgeComparison {
  std::size_t edges = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

EdgeComparison compare_edges(const std::vector<std::pair<Index, Index>>& found,
                             const std::vector<std::pair<Index, Index>>& truth);

}  // namespace approxreg
