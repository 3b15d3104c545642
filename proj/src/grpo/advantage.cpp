#include "geoloop/grpo/advantage.hpp"

#include <cmath>

namespace geoloop::grpo {

AdvantageResult advantages(const std::vector<int>& rewards) {
  size_t g = rewards.size();
  if (g < 2) throw GroupTooSmall("group size must be >= 2");
  double mean = 0.0;
  for (int r : rewards) mean += r;
  mean /= double(g);
  double var = 0.0;
  for (int r : rewards) var += (r - mean) * (r - mean);
  var /= double(g);  // population variance
  double std = std::sqrt(var);

  AdvantageResult out;
  if (std < 1e-6) {
    out.degenerate = true;
    out.advantages.assign(g, 0.0);
    return out;
  }
  for (int r : rewards) out.advantages.push_back((r - mean) / std);
  return out;
}

SetSelection select_sets(const std::vector<int>& rewards, bool has_reference) {
  SetSelection s;
  int sum = 0;
  for (int r : rewards) sum += r;
  if (sum > 0) {
    for (size_t i = 0; i < rewards.size(); ++i)
      (rewards[i] ? s.pos : s.neg).push_back(int(i));
    return s;
  }
  if (!has_reference)
    throw MissingReference("all attempts failed and no reference available");
  s.reference_injected = true;  // pos = {a_ref}
  for (size_t i = 0; i < rewards.size(); ++i) s.neg.push_back(int(i));
  return s;
}

}  // namespace geoloop::grpo
