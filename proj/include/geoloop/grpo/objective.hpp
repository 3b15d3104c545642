#pragma once

#include <stdexcept>
#include <vector>

namespace geoloop::grpo {

class NonFiniteRatio : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Token-level log-probabilities of one attempt under the current and the
// reference policy (equal lengths >= 1).
struct AttemptTrace {
  std::vector<double> logp_cur;
  std::vector<double> logp_ref;
};

// Clipped surrogate: per-attempt token mean of min(r_t A, clip(r_t, 1-eps, 1+eps) A),
// group-averaged, minus beta * KL(pi_theta || pi_ref) using the k3
// estimator. Returns the negated objective as a loss.
double clipped_surrogate(const std::vector<AttemptTrace>& group,
                         const std::vector<double>& advantages, double eps,
                         double beta);

// One attempt in the optimization set Z = pos ∪ neg.
struct Eq5Attempt {
  std::vector<double> logp;   // log pi_theta per token
  std::vector<double> ratio;  // r_t = pi_theta / pi_ref (1 for injected ref)
  double advantage = 0.0;
};

// Solver loss: loss = -(1/|Z|) sum_a (1/|a|) sum_t (A + beta*(r_t - 1)) * logp_t.
double solver_loss(const std::vector<Eq5Attempt>& z, double beta);

}  // namespace geoloop::grpo
