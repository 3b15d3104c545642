#include "geoloop/grpo/objective.hpp"

#include <algorithm>
#include <cmath>

namespace geoloop::grpo {

double clipped_surrogate(const std::vector<AttemptTrace>& group,
                         const std::vector<double>& advantages, double eps,
                         double beta) {
  if (group.empty()) throw EmptySet("empty attempt group");
  if (group.size() != advantages.size())
    throw EmptySet("advantage count mismatch");

  double surrogate = 0.0;
  double kl = 0.0;
  size_t tokens = 0;
  for (size_t i = 0; i < group.size(); ++i) {
    const auto& tr = group[i];
    if (tr.logp_cur.empty() || tr.logp_cur.size() != tr.logp_ref.size())
      throw EmptySet("malformed trace lengths");
    double a = advantages[i];
    double acc = 0.0;
    for (size_t t = 0; t < tr.logp_cur.size(); ++t) {
      double r = std::exp(tr.logp_cur[t] - tr.logp_ref[t]);
      if (!std::isfinite(r)) throw NonFiniteRatio("token ratio not finite");
      double clipped = std::clamp(r, 1.0 - eps, 1.0 + eps);
      acc += std::min(r * a, clipped * a);
      // k3 estimator of KL(pi_theta || pi_ref), rho = pi_ref / pi_theta
      double rho = std::exp(tr.logp_ref[t] - tr.logp_cur[t]);
      kl += rho - 1.0 - std::log(rho);
      ++tokens;
    }
    surrogate += acc / double(tr.logp_cur.size());
  }
  surrogate /= double(group.size());
  double kl_mean = tokens ? kl / double(tokens) : 0.0;
  return -(surrogate - beta * kl_mean);
}

double solver_loss(const std::vector<Eq5Attempt>& z, double beta) {
  if (z.empty()) throw EmptySet("empty optimization set Z");
  double total = 0.0;
  for (const auto& a : z) {
    if (a.logp.empty() || a.logp.size() != a.ratio.size())
      throw EmptySet("malformed attempt trace");
    double acc = 0.0;
    for (size_t t = 0; t < a.logp.size(); ++t) {
      if (!std::isfinite(a.ratio[t])) throw NonFiniteRatio("ratio not finite");
      acc += (a.advantage + beta * (a.ratio[t] - 1.0)) * a.logp[t];
    }
    total += acc / double(a.logp.size());
  }
  return -total / double(z.size());
}

}  // namespace geoloop::grpo
