#include "geoloop/grpo/toy_policy.hpp"

#include <cmath>
#include <sstream>

#include "geoloop/grpo/advantage.hpp"
#include "geoloop/grpo/objective.hpp"

namespace geoloop::grpo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t s) {
  return double(splitmix64(s) >> 11) * (1.0 / 9007199254740992.0);
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = logits[0];
  for (double l : logits) mx = std::max(mx, l);
  double z = 0.0;
  std::vector<double> p(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  std::uint64_t x = splitmix64(seed);
  x = splitmix64(x ^ (a * 0x9e3779b97f4a7c15ULL));
  x = splitmix64(x ^ (b * 0xc2b2ae3d27d4eb4fULL));
  x = splitmix64(x ^ (c * 0x165667b19e3779f9ULL));
  return x;
}

double seed_uniform01(std::uint64_t seed) { return uniform01(seed); }

void ToyPolicy::ensure(const std::string& problem_id) {
  if (!logits.count(problem_id))
    logits[problem_id] = std::vector<double>(vocab.size(), 0.0);
}

std::vector<double> ToyPolicy::probs(const std::string& problem_id) const {
  auto it = logits.find(problem_id);
  if (it == logits.end())
    return std::vector<double>(vocab.size(), 1.0 / double(vocab.size()));
  return softmax(it->second);
}

int ToyPolicy::vocab_index(const std::string& answer) const {
  for (size_t i = 0; i < vocab.size(); ++i)
    if (vocab[i] == answer) return int(i);
  return -1;
}

int ToyPolicy::draw(const std::string& problem_id, double u) const {
  auto p = probs(problem_id);
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return int(i);
  }
  return int(p.size()) - 1;
}

double toy_loss_value(const std::vector<double>& logits,
                      const std::vector<double>& ref_probs,
                      const std::vector<int>& attempt_indices,
                      const std::vector<double>& advantages,
                      int injected_ref_index, double beta) {
  auto p = softmax(logits);
  size_t zsize = attempt_indices.size() + (injected_ref_index >= 0 ? 1 : 0);
  if (zsize == 0) throw EmptySet("empty optimization set Z");
  double total = 0.0;
  for (size_t i = 0; i < attempt_indices.size(); ++i) {
    int a = attempt_indices[i];
    double logp = std::log(p[size_t(a)]);
    double r = p[size_t(a)] / ref_probs[size_t(a)];
    total += (advantages[i] + beta * (r - 1.0)) * logp;
  }
  if (injected_ref_index >= 0) {
    // off-policy reference: advantage +1, importance ratio pinned to 1
    total += std::log(p[size_t(injected_ref_index)]);
  }
  return -total / double(zsize);
}

std::vector<double> toy_loss_gradient(const std::vector<double>& logits,
                                      const std::vector<double>& ref_probs,
                                      const std::vector<int>& attempt_indices,
                                      const std::vector<double>& advantages,
                                      int injected_ref_index, double beta) {
  auto p = softmax(logits);
  size_t zsize = attempt_indices.size() + (injected_ref_index >= 0 ? 1 : 0);
  if (zsize == 0) throw EmptySet("empty optimization set Z");
  std::vector<double> grad(logits.size(), 0.0);
  auto add = [&](int a, double weight) {
    // d/d logit_j of weight-composed terms, with dlogp_a = (delta_aj - p_j)
    for (size_t j = 0; j < grad.size(); ++j) {
      double d = (int(j) == a ? 1.0 : 0.0) - p[j];
      grad[j] += weight * d;
    }
  };
  for (size_t i = 0; i < attempt_indices.size(); ++i) {
    int a = attempt_indices[i];
    double logp = std::log(p[size_t(a)]);
    double r = p[size_t(a)] / ref_probs[size_t(a)];
    // d/dlogit_j [(A + beta(r-1)) logp] =
    //   (delta-p)[(A + beta(r-1)) + beta * r * logp]
    add(a, (advantages[i] + beta * (r - 1.0)) + beta * r * logp);
  }
  if (injected_ref_index >= 0) add(injected_ref_index, 1.0);
  for (double& g : grad) g = -g / double(zsize);
  return grad;
}

TrainResult train_toy(ToyPolicy policy,
                      const std::vector<TrainProblem>& problems,
                      const TrainConfig& cfg) {
  std::vector<int> ref_idx;
  for (const auto& pr : problems) {
    int idx = policy.vocab_index(pr.reference_answer);
    if (idx < 0) throw VocabularyMiss(pr.problem_id);
    ref_idx.push_back(idx);
    policy.ensure(pr.problem_id);
  }

  TrainResult res;
  for (int it = 0; it < cfg.iterations; ++it) {
    double loss_sum = 0.0;
    for (size_t pi = 0; pi < problems.size(); ++pi) {
      const auto& pid = problems[pi].problem_id;
      auto ref_probs = policy.probs(pid);  // per-iteration snapshot

      std::vector<int> attempts, rewards;
      for (int a = 0; a < cfg.k; ++a) {
        int pick = policy.draw(
            pid, uniform01(mix_seed(cfg.seed, std::uint64_t(it), pi,
                                    std::uint64_t(a))));
        attempts.push_back(pick);
        rewards.push_back(pick == ref_idx[pi] ? 1 : 0);
      }
      auto adv = advantages(rewards);
      auto sel = select_sets(rewards, true);
      int injected = sel.reference_injected ? ref_idx[pi] : -1;

      auto& lg = policy.logits[pid];
      loss_sum += toy_loss_value(lg, ref_probs, attempts, adv.advantages,
                                 injected, cfg.beta);
      auto grad = toy_loss_gradient(lg, ref_probs, attempts, adv.advantages,
                                    injected, cfg.beta);
      for (size_t j = 0; j < lg.size(); ++j) lg[j] -= cfg.lr * grad[j];
    }

    // Mean@1: one fresh evaluation attempt per problem
    int hits = 0;
    for (size_t pi = 0; pi < problems.size(); ++pi) {
      int pick = policy.draw(problems[pi].problem_id,
                             uniform01(mix_seed(cfg.seed, std::uint64_t(it),
                                                pi, 0xe7a1ULL)));
      if (pick == ref_idx[pi]) ++hits;
    }
    res.curve.push_back({it, double(hits) / double(problems.size()),
                         loss_sum / double(problems.size())});
  }
  res.policy = std::move(policy);
  return res;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream os;
  os << "iteration,mean_at_1,loss\n";
  for (const auto& c : curve)
    os << c.iteration << "," << c.mean_at_1 << "," << c.loss << "\n";
  return os.str();
}

}  // namespace geoloop::grpo
