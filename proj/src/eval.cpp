#include "gtr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gtr/rng.hpp"

namespace gtr {
namespace {

struct PairRef {
  NodeId origin, dest;
};

std::vector<PairRef> enumerate_pairs(const SpaceGraph& g,
                                     const PairFilter& filter) {
  const int n = g.size();
  std::vector<PairRef> pairs;
  if (filter.kind == PairFilter::Kind::All) {
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1));
    for (NodeId d = 0; d < n; ++d) {
      for (NodeId o = 0; o < n; ++o) {
        if (o != d) pairs.push_back({o, d});
      }
    }
  } else {
    Rng rng(derive_seed(filter.seed, "pair-filter"));
    while (pairs.size() < filter.count) {
      const NodeId o = static_cast<NodeId>(rng.below(n));
      const NodeId d = static_cast<NodeId>(rng.below(n));
      if (o != d) pairs.push_back({o, d});
    }
    // Group by destination so each Dijkstra is reused.
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const PairRef& a, const PairRef& b) {
                       return a.dest < b.dest;
                     });
  }
  return pairs;
}

}  // namespace

EvalReport apnsp_accuracy(const Policy& policy, const SpaceGraph& g,
                          double epsilon, const PairFilter& filter,
                          Fallback fallback, bool keep_pairs) {
  EvalReport report;
  report.policy = policy.name();
  report.epsilon = epsilon;

  const auto pairs = enumerate_pairs(g, filter);
  const bool needs_oracle_dist = policy.kind() == Policy::Kind::OracleShortest;

  std::vector<double> dist;
  NodeId cached_dest = -1;
  std::size_t eta_sum = 0;
  double stretch_sum = 0.0;
  std::size_t total_pairs = 0;
  for (const auto& [origin, dest] : pairs) {
    ++total_pairs;
    if (dest != cached_dest) {
      dist = dijkstra(g, dest);
      cached_dest = dest;
    }
    if (!std::isfinite(dist[origin])) continue;  // vacuous pair
    if (g.metric_distance(origin, dest) <= 0.0) continue;
    const auto ctx = pair_context(g, origin, dest, epsilon, dist);
    const auto rr = route(policy, g, ctx, fallback, ctx.stretch_bound(),
                          needs_oracle_dist ? &dist : nullptr);
    PairOutcome out;
    out.origin = origin;
    out.dest = dest;
    out.d_e = ctx.d_e;
    out.d_sp = ctx.d_sp;
    out.zeta = ctx.zeta;
    out.d_p = rr.d_p;
    out.delivered = rr.delivered;
    out.hops = static_cast<int>(rr.path.size()) - 1;
    out.eta = rr.delivered && rr.d_p <= ctx.d_sp * ctx.stretch_bound() ? 1 : 0;
    ++report.counted_pairs;
    report.delivered_count += rr.delivered;
    eta_sum += out.eta;
    if (rr.delivered) stretch_sum += rr.d_p / ctx.d_sp;
    if (keep_pairs) report.pairs.push_back(out);
  }
  report.accuracy = report.counted_pairs
                        ? static_cast<double>(eta_sum) / report.counted_pairs
                        : 0.0;
  if (filter.kind == PairFilter::Kind::All) {
    const double n = g.size();
    report.accuracy_raw_eq1 = (static_cast<double>(eta_sum) + n) / (n * n);
  } else {
    report.accuracy_raw_eq1 =
        total_pairs ? static_cast<double>(eta_sum) / total_pairs : 0.0;
  }
  report.mean_stretch_ratio =
      report.delivered_count ? stretch_sum / report.delivered_count : 0.0;
  return report;
}

void write_eval_csv_header(std::ostream& out) {
  out << "space,n,cell_param,graph_seed,policy,epsilon,pairs_counted,"
         "delivered,accuracy,accuracy_raw_eq1,mean_stretch_ratio\n";
}

void write_eval_csv_row(std::ostream& out, const SpaceGraph& g,
                        const EvalReport& report) {
  out << (g.space() == Space::Euclidean ? "euclidean" : "hyperbolic") << ','
      << g.size() << ',' << g.density_param() << ',' << g.seed() << ','
      << report.policy << ',' << report.epsilon << ',' << report.counted_pairs
      << ',' << report.delivered_count << ',' << report.accuracy << ','
      << report.accuracy_raw_eq1 << ',' << report.mean_stretch_ratio << "\n";
}

void write_pair_csv(std::ostream& out, const EvalReport& report) {
  out << "origin,dest,d_e,d_sp,zeta,d_p,delivered,eta,hops\n";
  for (const auto& p : report.pairs) {
    out << p.origin << ',' << p.dest << ',' << p.d_e << ',' << p.d_sp << ','
        << p.zeta << ',';
    if (std::isfinite(p.d_p)) {
      out << p.d_p;
    } else {
      out << "inf";
    }
    out << ',' << (p.delivered ? 1 : 0) << ',' << p.eta << ',' << p.hops
        << "\n";
  }
}

}  // namespace gtr
