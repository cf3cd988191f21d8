#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gtr/policy.hpp"

namespace gtr {

struct PairOutcome {
  NodeId origin = -1, dest = -1;
  double d_e = 0.0, d_sp = 0.0, zeta = 1.0;
  double d_p = kInf;
  bool delivered = false;
  int eta = 0;
  int hops = 0;
};

struct EvalReport {
  std::string graph_label;
  std::string policy;
  double epsilon = 0.05;
  std::size_t counted_pairs = 0;    // ordered pairs, O != D, finite d_sp
  std::size_t delivered_count = 0;
  double accuracy = 0.0;            // sum eta / counted_pairs
  // Raw convention: denominator |V|^2 with the diagonal scored 1 and
  // unreachable pairs scored 0 (secondary diagnostic column).
  double accuracy_raw_eq1 = 0.0;
  double mean_stretch_ratio = 0.0;  // mean d_p/d_sp over delivered pairs
  std::vector<PairOutcome> pairs;   // populated when keep_pairs
};

struct PairFilter {
  enum class Kind { All, Sampled };
  Kind kind = Kind::All;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  static PairFilter all() { return {}; }
  static PairFilter sampled(std::size_t count, std::uint64_t seed) {
    return {Kind::Sampled, count, seed};
  }
};

// Routes every admissible ordered pair under the policy and scores
// eta(O,D) = 1 iff delivered within d_sp * zeta * (1 + epsilon).
EvalReport apnsp_accuracy(const Policy& policy, const SpaceGraph& g,
                          double epsilon, const PairFilter& filter,
                          Fallback fallback = Fallback::None,
                          bool keep_pairs = false);

void write_eval_csv_header(std::ostream& out);
void write_eval_csv_row(std::ostream& out, const SpaceGraph& g,
                        const EvalReport& report);
void write_pair_csv(std::ostream& out, const EvalReport& report);

}  // namespace gtr
