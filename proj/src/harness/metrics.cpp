#include "geoloop/harness/metrics.hpp"

namespace geoloop::harness {

EvalReport mean_at_n(const std::vector<std::vector<int>>& attempt_matrix) {
  if (attempt_matrix.empty()) throw EmptyEvaluation("no problems");
  EvalReport r;
  int passed = 0;
  for (const auto& row : attempt_matrix) {
    if (row.empty()) throw EmptyEvaluation("problem with no attempts");
    int ok = 0;
    for (int v : row)
      if (v == 1) ok = 1;
    r.passed.push_back(ok);
    passed += ok;
  }
  r.mean_at_n = double(passed) / double(attempt_matrix.size());
  return r;
}

GenexamScore genexam_scores(const std::vector<GenexamItem>& items) {
  if (items.empty()) throw EmptyEvaluation("no items");
  GenexamScore s;
  int strict = 0;
  double relaxed_sum = 0.0;
  for (const auto& it : items) {
    if (it.c < 0.0 || it.c > 1.0 || it.v_sp < 0 || it.v_sp > 2 ||
        it.v_lc < 0 || it.v_lc > 2 || it.v_rd < 0 || it.v_rd > 2)
      throw RangeError("genexam item out of range");
    // 0.7C + 0.1(Vsp/2) + 0.1(Vlc/2) + 0.1(Vrd/2) as one exact quotient,
    // so a perfect item scores exactly 1.0
    double relaxed = (14.0 * it.c + it.v_sp + it.v_lc + it.v_rd) / 20.0;
    s.relaxed_items.push_back(relaxed);
    relaxed_sum += relaxed;
    if (it.c == 1.0 && it.v_sp == 2 && it.v_lc == 2 && it.v_rd == 2) ++strict;
  }
  s.strict_pct = 100.0 * double(strict) / double(items.size());
  s.relaxed_pct = 100.0 * relaxed_sum / double(items.size());
  return s;
}

}  // namespace geoloop::harness
