#pragma once

#include <stdexcept>
#include <vector>

namespace geoloop::grpo {

class GroupTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingReference : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdvantageResult {
  std::vector<double> advantages;
  bool degenerate = false;  // all-equal rewards; advantages forced to zero
};

// Group normalization with population std and an eps_std = 1e-6
// guard: zero-variance groups yield all-zero advantages plus the flag.
AdvantageResult advantages(const std::vector<int>& rewards);

struct SetSelection {
  std::vector<int> pos;  // attempt indices
  std::vector<int> neg;
  bool reference_injected = false;  // all-fail case: pos is {a_ref}
};

// Positive/negative case split. has_reference gates the all-fail injection; an all-fail
// group without a reference raises MissingReference.
SetSelection select_sets(const std::vector<int>& rewards, bool has_reference);

}  // namespace geoloop::grpo
