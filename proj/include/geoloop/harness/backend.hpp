#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoloop/grpo/toy_policy.hpp"
#include "geoloop/harness/verify.hpp"

namespace geoloop::harness {

class BackendUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveRequest {
  std::string problem_id;
  std::string question_text;
  std::string instructions_text;
  double temperature = 0.1;
  int max_tokens = 1024;
};

struct SolveAttempt {
  std::string problem_id;
  std::string raw_text;
  std::optional<std::string> extracted;
  int reward = 0;
  double latency_ms = 0.0;
  std::string backend;
  std::string error;  // "", "Timeout", "TransportError", "MalformedResponse"
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  // Deterministic for toy/scripted backends given the seed.
  virtual std::string complete(const SolveRequest& req, std::uint64_t seed) = 0;
  // Fail-fast probe; throws BackendUnavailable when unreachable.
  virtual void health_check() {}
};

// Samples an answer word from a shared trainable categorical policy.
class ToyBackend : public Backend {
 public:
  explicit ToyBackend(const grpo::ToyPolicy* policy) : policy_(policy) {}
  std::string name() const override { return "toy"; }
  std::string complete(const SolveRequest& req, std::uint64_t seed) override;

 private:
  const grpo::ToyPolicy* policy_;
};

// Canned responses for tests and offline fixtures: per-problem response
// lists cycled by seed, with a global fallback.
class ScriptedBackend : public Backend {
 public:
  std::map<std::string, std::vector<std::string>> responses;
  std::string fallback = "I cannot solve this.";

  std::string name() const override { return "scripted"; }
  std::string complete(const SolveRequest& req, std::uint64_t seed) override;
};

struct HttpConfig {
  std::string url;            // scheme://host:port
  std::string model = "default";
  int timeout_s = 300;
  int max_tokens = 1024;
  double temperature = 0.1;
};

// Text-only completion client. Per-attempt failures are reported via
// exceptions carrying a category string; the batch driver records them
// without aborting.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpConfig cfg) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "http"; }
  std::string complete(const SolveRequest& req, std::uint64_t seed) override;
  void health_check() override;

 private:
  HttpConfig cfg_;
};

class AttemptError : public std::runtime_error {
 public:
  AttemptError(std::string category, const std::string& what)
      : std::runtime_error(what), category(std::move(category)) {}
  std::string category;
};

// n attempts with extraction + verification; attempt-level errors are
// isolated into the record, never thrown.
std::vector<SolveAttempt> solve_problem(Backend& backend,
                                        const SolveRequest& req, int n,
                                        std::uint64_t base_seed,
                                        const Reference& ref);

}  // namespace geoloop::harness
