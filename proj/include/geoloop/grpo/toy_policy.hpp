#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoloop::grpo {

class VocabularyMiss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-problem categorical distribution over a shared answer vocabulary:
// a desk-scale stand-in for the LLM solver.
struct ToyPolicy {
  std::vector<std::string> vocab;
  std::map<std::string, std::vector<double>> logits;  // problem_id -> logits

  void ensure(const std::string& problem_id);  // uniform init
  std::vector<double> probs(const std::string& problem_id) const;
  int vocab_index(const std::string& answer) const;  // -1 if absent
  // inverse-CDF draw from one uniform double in [0,1)
  int draw(const std::string& problem_id, double u) const;
};

struct TrainProblem {
  std::string problem_id;
  std::string reference_answer;  // must be in the vocabulary
};

struct TrainConfig {
  int iterations = 200;
  int k = 8;          // attempts per problem per iteration
  double lr = 0.1;
  double eps = 0.2;
  double beta = 0.04;
  std::uint64_t seed = 0;
};

struct CurvePoint {
  int iteration = 0;
  double mean_at_1 = 0.0;
  double loss = 0.0;
};

struct TrainResult {
  ToyPolicy policy;
  std::vector<CurvePoint> curve;
};

// Analytic gradient of the solver loss for the single-token categorical
// policy, with reference injection on all-fail groups. The verifier channel
// is binary reward only; the policy never sees traces.
// d(loss)/d(logit_j) accumulated over the attempt set.
std::vector<double> toy_loss_gradient(const std::vector<double>& logits,
                                      const std::vector<double>& ref_probs,
                                      const std::vector<int>& attempt_indices,
                                      const std::vector<double>& advantages,
                                      int injected_ref_index,  // -1 if none
                                      double beta);

// Matching loss value (for finite-difference checks and curve export).
double toy_loss_value(const std::vector<double>& logits,
                      const std::vector<double>& ref_probs,
                      const std::vector<int>& attempt_indices,
                      const std::vector<double>& advantages,
                      int injected_ref_index, double beta);

TrainResult train_toy(ToyPolicy policy, const std::vector<TrainProblem>& problems,
                      const TrainConfig& cfg);

// CSV export: iteration,mean_at_1,loss
std::string curve_csv(const std::vector<CurvePoint>& curve);

// Deterministic per-draw seed mixing.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c);

// One uniform double in [0,1) from a seed (stateless).
double seed_uniform01(std::uint64_t seed);

}  // namespace geoloop::grpo
