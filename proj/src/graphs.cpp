#include "approxreg/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <set>

#include "approxreg/errors.hpp"
#include "approxreg/parallel.hpp"

namespace approxreg {

DependencyGraph fgr1st(const Eigen::MatrixXd& x, const SelectionConfig& cfg) {
  const auto q = static_cast<std::size_t>(x.cols());
  if (q < 2) throw UsageError("fgr1st needs at least two covariates");
  if (cfg.xinr) throw UsageError("fgr1st adds its own intercept; xinr is not supported");
  const DataMatrix base(x.col(0), x);
  cfg.validate(q);

  std::vector<std::vector<DirectedEdge>> per_node(q);
  parallel_for(q, cfg.threads, [&](std::size_t i) {
    const Index node = i + 1;
    const DataMatrix data = base.with_response(x.col(static_cast<Eigen::Index>(i)));
    SelectionConfig c = cfg;
    c.threads = 1;
    c.kex.push_back(node);
    c.covariate_count = cfg.covariate_count.value_or(q - 1);
    const auto approx = f1st(data, c);
    if (!approx || !approx->valid) return;
    for (const PValueRecord& rec : approx->records) {
      if (rec.covariate == kIntercept) continue;
      per_node[i].push_back({node, rec.covariate, rec.p_gauss});
    }
  });

  DependencyGraph g;
  g.nodes = q;
  std::set<std::pair<Index, Index>> pairs;
  for (auto& edges : per_node) {
    std::sort(edges.begin(), edges.end(),
              [](const DirectedEdge& a, const DirectedEdge& b) { return a.to < b.to; });
    for (const DirectedEdge& e : edges) {
      g.directed.push_back(e);
      pairs.emplace(std::min(e.from, e.to), std::max(e.from, e.to));
    }
  }
  g.undirected.assign(pairs.begin(), pairs.end());
  return g;
}

void write_directed_edges(std::ostream& out, const DependencyGraph& g) {
  out << "from,to,p_gauss\n";
  char buf[32];
  for (const DirectedEdge& e : g.directed) {
    std::snprintf(buf, sizeof buf, "%.6e", e.p_gauss);
    out << e.from << ',' << e.to << ',' << buf << '\n';
  }
}

void write_undirected_edges(std::ostream& out, const DependencyGraph& g) {
  out << "a,b\n";
  for (const auto& [a, b] : g.undirected) out << a << ',' << b << '\n';
}

RandomGraphFixture meinshausen_buhlmann_graph(std::size_t n, std::size_t q, std::uint64_t seed,
                                              std::size_t max_degree, double partial) {
  if (q < 2 || n < 2) throw UsageError("random graph needs n, q >= 2");
  if (std::abs(partial) * static_cast<double>(max_degree) >= 1.0) {
    throw UsageError("precision matrix would not be diagonally dominant");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> px(q), py(q);
  for (std::size_t i = 0; i < q; ++i) {
    px[i] = unit(rng);
    py[i] = unit(rng);
  }
  const double scale = std::sqrt(static_cast<double>(q));
  const double norm_const = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> degree(q, 0);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = a + 1; b < q; ++b) {
      const double d = std::hypot(px[a] - px[b], py[a] - py[b]) / scale;
      if (unit(rng) < norm_const * std::exp(-0.5 * d * d)) {
        edges.emplace_back(a, b);
        ++degree[a];
        ++degree[b];
      }
    }
  }

  // Random edge removal down to the degree bound. The first sweep only drops
  // edges whose endpoints are both over the bound, so a removal never pushes a
  // node below it needlessly; the second sweep clears what remains.
  std::shuffle(edges.begin(), edges.end(), rng);
  std::vector<bool> removed(edges.size(), false);
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (removed[e]) continue;
      const auto [a, b] = edges[e];
      const bool over_a = degree[a] > max_degree, over_b = degree[b] > max_degree;
      if (sweep == 0 ? (over_a && over_b) : (over_a || over_b)) {
        removed[e] = true;
        --degree[a];
        --degree[b];
      }
    }
  }
  std::vector<std::set<std::size_t>> adj(q);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (removed[e]) continue;
    adj[edges[e].first].insert(edges[e].second);
    adj[edges[e].second].insert(edges[e].first);
  }

  RandomGraphFixture fx;
  const auto qi = static_cast<Eigen::Index>(q);
  Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(qi, qi);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b : adj[a]) {
      precision(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = partial;
      if (a < b) fx.edges.emplace_back(a + 1, b + 1);
    }
  }
  std::sort(fx.edges.begin(), fx.edges.end());

  // x^T = L^{-T} z with precision = L L^T gives covariance precision^{-1}.
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw ConsistencyError("precision matrix not positive definite");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd z(qi, static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    for (Eigen::Index r = 0; r < qi; ++r) z(r, c) = gauss(rng);
  }
  llt.matrixU().solveInPlace(z);
  fx.x = z.transpose();
  return fx;
}

EdgeComparison compare_edges(const std::vector<std::pair<Index, Index>>& found,
                             const std::vector<std::pair<Index, Index>>& truth) {
  auto norm = [](const std::vector<std::pair<Index, Index>>& edges) {
    std::set<std::pair<Index, Index>> s;
    for (const auto& [a, b] : edges) s.emplace(std::min(a, b), std::max(a, b));
    return s;
  };
  const auto f = norm(found);
  const auto t = norm(truth);
  EdgeComparison cmp;
  cmp.edges = f.size();
  for (const auto& e : f) cmp.false_positives += t.count(e) ? 0 : 1;
  for (const auto& e : t) cmp.false_negatives += f.count(e) ? 0 : 1;
  return cmp;
}

}  // namespace approxreg
