#include "geoloop/harness/backend.hpp"

#include <chrono>

#include "geoloop/harness/extract.hpp"
#include "httplib.h"
#include "json.hpp"

namespace geoloop::harness {

std::string ToyBackend::complete(const SolveRequest& req, std::uint64_t seed) {
  int idx = policy_->draw(req.problem_id, grpo::seed_uniform01(seed));
  return "The answer is \\boxed{" + policy_->vocab.at(size_t(idx)) + "}.";
}

std::string ScriptedBackend::complete(const SolveRequest& req,
                                      std::uint64_t seed) {
  auto it = responses.find(req.problem_id);
  if (it == responses.end() || it->second.empty()) return fallback;
  return it->second[size_t(seed % it->second.size())];
}

void HttpBackend::health_check() {
  httplib::Client cli(cfg_.url);
  cli.set_connection_timeout(5, 0);
  auto res = cli.Get("/health");
  if (!res) res = cli.Get("/");
  if (!res)
    throw BackendUnavailable("endpoint unreachable: " + cfg_.url);
}

std::string HttpBackend::complete(const SolveRequest& req, std::uint64_t) {
  httplib::Client cli(cfg_.url);
  cli.set_connection_timeout(cfg_.timeout_s, 0);
  cli.set_read_timeout(cfg_.timeout_s, 0);
  cli.set_write_timeout(cfg_.timeout_s, 0);

  nlohmann::json body{
      {"model", cfg_.model},
      {"prompt", req.instructions_text + "\n\n" + req.question_text},
      {"temperature", cfg_.temperature},
      {"max_tokens", cfg_.max_tokens},
  };
  auto res = cli.Post("/v1/completions", body.dump(), "application/json");
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        err == httplib::Error::Read || err == httplib::Error::Write)
      throw AttemptError("Timeout", httplib::to_string(err));
    throw AttemptError("TransportError", httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300)
    throw AttemptError("TransportError",
                       "http status " + std::to_string(res->status));
  try {
    auto j = nlohmann::json::parse(res->body);
    if (j.contains("text")) return j["text"].get<std::string>();
    if (j.contains("choices") && !j["choices"].empty()) {
      const auto& c = j["choices"][0];
      if (c.contains("text")) return c["text"].get<std::string>();
      if (c.contains("message") && c["message"].contains("content"))
        return c["message"]["content"].get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  throw AttemptError("MalformedResponse", "unrecognized response body");
}

std::vector<SolveAttempt> solve_problem(Backend& backend,
                                        const SolveRequest& req, int n,
                                        std::uint64_t base_seed,
                                        const Reference& ref) {
  std::vector<SolveAttempt> out;
  for (int i = 0; i < n; ++i) {
    SolveAttempt a;
    a.problem_id = req.problem_id;
    a.backend = backend.name();
    auto t0 = std::chrono::steady_clock::now();
    try {
      a.raw_text = backend.complete(
          req, grpo::mix_seed(base_seed, 0x50f7ULL, std::uint64_t(i), 1));
      a.extracted = extract_answer(a.raw_text);
      a.reward = verify(a.extracted, ref);
    } catch (const AttemptError& e) {
      a.error = e.category;
    }
    a.latency_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace geoloop::harness
