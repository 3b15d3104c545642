#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace geoloop::harness {

class EmptyEvaluation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalReport {
  std::vector<int> passed;  // per-problem pass flag
  double mean_at_n = 0.0;   // passed / total, exactly
};

// A problem passes when at least one of its N attempts scored 1.
EvalReport mean_at_n(const std::vector<std::vector<int>>& attempt_matrix);

struct GenexamItem {
  double c = 0.0;  // correctness in [0,1]
  int v_sp = 0;    // spatial validity in {0,1,2}
  int v_lc = 0;    // logical consistency
  int v_rd = 0;    // readability
};

struct GenexamScore {
  double strict_pct = 0.0;   // 100 * fraction with C=1 and all V=2
  double relaxed_pct = 0.0;  // 100 * mean(0.7C + 0.1*Vsp/2 + ...)
  std::vector<double> relaxed_items;
};

GenexamScore genexam_scores(const std::vector<GenexamItem>& items);

}  // namespace geoloop::harness
