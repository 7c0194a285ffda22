#pragma once

// Brute-force reference for the evaluation metrics. Written directly from the
// definitions over plain strings so it shares no code with the library.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "atomiclo/taxonomy.hpp"

namespace atomiclo::testing {

struct OracleLO {
  std::string name;
  std::string action;
};

struct OracleScores {
  int em = 0;
  double jaccard = 0, precision = 0, recall = 0, f1 = 0;
  long distance_pairwise = 0, distance_setrule = 0;
};

class MetricOracle {
 public:
  explicit MetricOracle(const Taxonomy& t) {
    for (const auto& lo : t.objectives()) los_[lo.code.str()] = {lo.name, std::string(to_string(lo.action))};
  }

  OracleScores score(std::vector<std::string> f, std::vector<std::string> g) const {
    unique(f);
    unique(g);
    OracleScores s;
    const double inter = static_cast<double>(count_in(f, g));
    const double uni = static_cast<double>(f.size() + g.size()) - inter;
    const bool both_empty = f.empty() && g.empty();

    s.em = (f.size() == g.size() && count_in(f, g) == f.size()) ? 1 : 0;
    s.jaccard = both_empty ? 1.0 : inter / uni;
    if (both_empty) {
      s.precision = s.recall = s.f1 = 1.0;
    } else {
      s.precision = f.empty() ? 0.0 : inter / static_cast<double>(f.size());
      s.recall = g.empty() ? 0.0 : inter / static_cast<double>(g.size());
      s.f1 = (s.precision + s.recall == 0.0) ? 0.0
                                             : 2 * s.precision * s.recall / (s.precision + s.recall);
    }

    // Displayed formula: every predicted LO pays its nearest ground-truth LO;
    // every missed ground-truth LO pays the unmatched cost.
    for (const auto& a : f) {
      if (g.empty()) {
        s.distance_pairwise += unmatched(a, g);
        continue;
      }
      long best = 99;
      for (const auto& b : g) best = std::min(best, d(a, b));
      s.distance_pairwise += best;
    }
    for (const auto& b : g) {
      if (!has(f, b)) s.distance_pairwise += unmatched(b, f);
    }

    // Prose rule: only LOs in exactly one set pay, at 1 or 2.
    for (const auto& a : f) {
      if (!has(g, a)) s.distance_setrule += unmatched(a, g);
    }
    for (const auto& b : g) {
      if (!has(f, b)) s.distance_setrule += unmatched(b, f);
    }
    return s;
  }

  long d(const std::string& a, const std::string& b) const {
    const auto& x = los_.at(a);
    const auto& y = los_.at(b);
    if (x.name != y.name) return 3;
    if (x.action != y.action) return 2;
    if (a != b) return 1;
    return 0;
  }

  long unmatched(const std::string& lo, const std::vector<std::string>& other) const {
    for (const auto& o : other) {
      if (los_.at(o).name == los_.at(lo).name) return 1;
    }
    return 2;
  }

 private:
  static void unique(std::vector<std::string>& v) {
    std::vector<std::string> out;
    for (auto& x : v) {
      if (!has(out, x)) out.push_back(x);
    }
    v = std::move(out);
  }
  static bool has(const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  }
  static std::size_t count_in(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t n = 0;
    for (const auto& x : a) n += has(b, x) ? 1 : 0;
    return n;
  }

  std::map<std::string, OracleLO> los_;
};

inline std::vector<std::string> as_strings(const std::vector<LOCode>& codes) {
  std::vector<std::string> out;
  for (const auto& c : codes) out.push_back(c.str());
  return out;
}

}  // namespace atomiclo::testing
