#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "geoloop/dsl/print.hpp"
#include "geoloop/gen/program_generator.hpp"
#include "geoloop/harness/backend.hpp"
#include "geoloop/harness/config.hpp"
#include "geoloop/harness/extract.hpp"
#include "geoloop/harness/loop.hpp"
#include "geoloop/harness/metrics.hpp"
#include "geoloop/harness/verify.hpp"
#include "httplib.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace geoloop;
using namespace geoloop::harness;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_dir(const std::string& tag) {
  auto d = fs::temp_directory_path() / ("geoloop_harness_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d.string();
}

void write_seeds(const std::string& dir, int n, std::uint64_t seed) {
  auto corpus = gen::random_corpus(n, seed);
  for (size_t i = 0; i < corpus.size(); ++i) {
    std::ofstream(fs::path(dir) / ("seed_" + std::to_string(i) + ".geo"))
        << corpus[i].source_text;
  }
}

}  // namespace

TEST_CASE("answer extraction fixtures") {
  CHECK(extract_answer("thus \\boxed{60}") == std::optional<std::string>("60"));
  CHECK(extract_answer("The answer is C.") == std::optional<std::string>("C"));
  CHECK_FALSE(extract_answer("").has_value());
  // last boxed group wins
  CHECK(extract_answer("\\boxed{30} no wait \\boxed{45}") ==
        std::optional<std::string>("45"));
  // boxed beats a stray option letter
  CHECK(extract_answer("B is tempting but \\boxed{45}") ==
        std::optional<std::string>("45"));
  // the article "A" is not an option letter
  CHECK(extract_answer("A circle has radius 5") ==
        std::optional<std::string>("5"));
  // last numeric token fallback
  CHECK(extract_answer("maybe 30, maybe 40.") ==
        std::optional<std::string>("40"));
  CHECK_FALSE(extract_answer("no answer here").has_value());
}

TEST_CASE("semantic verification fixtures") {
  CHECK(verify(std::string("90 degrees"), Reference::numeric(90)) == 1);
  CHECK(verify(std::string("c"), Reference::letter("C")) == 1);
  CHECK(verify(std::string("59.9"), Reference::numeric(60)) == 0);
  CHECK(verify(std::string("60.0000001"), Reference::numeric(60)) == 1);
  CHECK(verify(std::string("5 cm"), Reference::numeric(5)) == 1);
  CHECK(verify(std::string("120\xC2\xB0"), Reference::numeric(120)) == 1);
  CHECK(verify(std::nullopt, Reference::numeric(60)) == 0);
  CHECK(verify(std::string("B"), Reference::letter("C")) == 0);
  CHECK(verify(std::string("not a number"), Reference::numeric(60)) == 0);
}

TEST_CASE("numeric_value strips stacked unit suffixes") {
  CHECK(numeric_value("120 deg") == doctest::Approx(120));
  CHECK(numeric_value("3.5 units") == doctest::Approx(3.5));
  CHECK_FALSE(numeric_value("xyz").has_value());
}

TEST_CASE("mean_at_n counts problems with any passing attempt") {
  auto rep = mean_at_n({{0, 1}, {0, 0}, {1, 1}});
  CHECK(rep.passed == std::vector<int>{1, 0, 1});
  CHECK(rep.mean_at_n == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(mean_at_n({}), EmptyEvaluation);
  CHECK_THROWS_AS(mean_at_n({{1}, {}}), EmptyEvaluation);

  // monotone in N: appending a success never lowers the score
  auto base = mean_at_n({{0, 0}, {0, 1}});
  auto more = mean_at_n({{0, 0, 1}, {0, 1, 0}});
  CHECK(more.mean_at_n >= base.mean_at_n);
}

TEST_CASE("genexam strict and relaxed scoring") {
  auto s = genexam_scores({{1.0, 2, 2, 2}, {1.0, 2, 2, 1}});
  CHECK(s.relaxed_items[0] == doctest::Approx(1.0));
  CHECK(s.relaxed_items[1] == doctest::Approx(0.95));
  CHECK(s.relaxed_pct == doctest::Approx(97.5));
  CHECK(s.strict_pct == doctest::Approx(50.0));
  CHECK_THROWS_AS(genexam_scores({{1.5, 2, 2, 2}}), RangeError);
  CHECK_THROWS_AS(genexam_scores({{1.0, 3, 2, 2}}), RangeError);
}

TEST_CASE("config parsing") {
  auto cfg = parse_config_text(
      "# loop settings\n"
      "iterations = 7\n"
      "k=4  # attempts\n"
      "lr = 0.5\n"
      "backend = scripted\n"
      "seeds = /tmp/seeds\n");
  CHECK(cfg.iterations == 7);
  CHECK(cfg.k == 4);
  CHECK(cfg.lr == doctest::Approx(0.5));
  CHECK(cfg.backend == "scripted");
  CHECK(cfg.seeds_path == "/tmp/seeds");
  CHECK(cfg.workers == 16);  // default survives

  CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("backend = quantum\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("iterations = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("backend = http\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config"), ConfigError);
}

TEST_CASE("scripted backend cycles responses and solve_problem scores them") {
  ScriptedBackend be;
  be.responses["p1"] = {"\\boxed{60}", "\\boxed{50}"};
  SolveRequest req;
  req.problem_id = "p1";
  auto attempts = solve_problem(be, req, 6, 0, Reference::numeric(60));
  REQUIRE(attempts.size() == 6);
  int correct = 0;
  for (const auto& a : attempts) {
    CHECK(a.backend == "scripted");
    CHECK(a.error.empty());
    correct += a.reward;
  }
  CHECK(correct > 0);
  CHECK(correct < 6);

  SolveRequest other;
  other.problem_id = "unknown";
  auto fb = solve_problem(be, other, 1, 0, Reference::numeric(60));
  CHECK(fb[0].reward == 0);
  CHECK_FALSE(fb[0].extracted.has_value());
}

TEST_CASE("toy backend is deterministic per seed") {
  grpo::ToyPolicy policy;
  policy.vocab = {"60", "50", "40"};
  policy.ensure("p1");
  ToyBackend be(&policy);
  SolveRequest req;
  req.problem_id = "p1";
  CHECK(be.complete(req, 42) == be.complete(req, 42));
  std::string out = be.complete(req, 42);
  CHECK(out.find("\\boxed{") != std::string::npos);
}

TEST_CASE("http backend against an in-process mock server") {
  httplib::Server srv;
  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
  srv.Post("/v1/completions",
           [](const httplib::Request& req, httplib::Response& res) {
             auto j = nlohmann::json::parse(req.body);
             CHECK(j.contains("prompt"));
             res.set_content(
                 nlohmann::json{{"text", "therefore \\boxed{60}"}}.dump(),
                 "application/json");
           });
  int port = srv.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread th([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();

  HttpConfig hc;
  hc.url = "http://127.0.0.1:" + std::to_string(port);
  hc.timeout_s = 5;
  HttpBackend be(hc);
  CHECK_NOTHROW(be.health_check());
  SolveRequest req;
  req.problem_id = "p1";
  req.question_text = "What is the angle?";
  auto attempts = solve_problem(be, req, 2, 0, Reference::numeric(60));
  REQUIRE(attempts.size() == 2);
  CHECK(attempts[0].reward == 1);
  CHECK(attempts[0].extracted == std::optional<std::string>("60"));

  srv.stop();
  th.join();
}

TEST_CASE("http backend reports malformed bodies and unreachable hosts") {
  httplib::Server srv;
  srv.Post("/v1/completions",
           [](const httplib::Request&, httplib::Response& res) {
             res.set_content("not json", "text/plain");
           });
  int port = srv.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread th([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();

  HttpConfig hc;
  hc.url = "http://127.0.0.1:" + std::to_string(port);
  hc.timeout_s = 5;
  HttpBackend be(hc);
  SolveRequest req;
  req.problem_id = "p1";
  auto attempts = solve_problem(be, req, 1, 0, Reference::numeric(60));
  CHECK(attempts[0].error == "MalformedResponse");
  CHECK(attempts[0].reward == 0);
  srv.stop();
  th.join();

  HttpConfig dead;
  dead.url = "http://127.0.0.1:1";  // nothing listens here
  HttpBackend down(dead);
  CHECK_THROWS_AS(down.health_check(), BackendUnavailable);
}

TEST_CASE("run_loop with zero iterations persists the seed curriculum") {
  std::string seeds = temp_dir("seeds_t0");
  write_seeds(seeds, 3, 11);
  Config cfg;
  cfg.seeds_path = seeds;
  cfg.out_dir = temp_dir("out_t0");
  cfg.iterations = 0;
  cfg.backend = "toy";
  auto art = run_loop(cfg);
  CHECK(art.curve.empty());
  CHECK(art.invented_count == 0);
  CHECK(art.final_curriculum.problems.size() == 3);
  CHECK(fs::exists(cfg.out_dir + "/curriculum.jsonl"));
  CHECK(fs::exists(cfg.out_dir + "/curve.csv"));
  CHECK(fs::exists(cfg.out_dir + "/pairs.jsonl"));
  for (const auto& p : art.final_curriculum.problems)
    CHECK(fs::exists(p.svg_path));
}

TEST_CASE("run_loop smoke with an always-wrong scripted backend") {
  std::string seeds = temp_dir("seeds_smoke");
  write_seeds(seeds, 4, 23);
  Config cfg;
  cfg.seeds_path = seeds;
  cfg.out_dir = temp_dir("out_smoke");
  cfg.iterations = 3;
  cfg.k = 4;
  cfg.sample_n = 2;
  cfg.workers = 3;
  ScriptedBackend be;
  be.fallback = "I believe the answer is \\boxed{7.25}.";
  auto art = run_loop(cfg, &be);
  CHECK(art.curve.size() == 3);
  for (const auto& pt : art.curve) CHECK(pt.mean_at_1 == doctest::Approx(0.0));
  // trajectory holds sample_n lines per iteration with k rewards each
  std::istringstream traj(slurp(cfg.out_dir + "/trajectory.jsonl"));
  std::string line;
  int lines = 0;
  while (std::getline(traj, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j["rewards"].size() == 4);
    ++lines;
  }
  CHECK(lines == 6);
  // any invented problem descends from a seed with a recorded all-fail group
  for (const auto& p : art.final_curriculum.problems) {
    if (!p.lineage) continue;
    const auto& parent_id = p.lineage->parent_id;
    CHECK(art.final_curriculum.contains(parent_id));
    auto it = art.final_curriculum.fail_groups.find(parent_id);
    REQUIRE(it != art.final_curriculum.fail_groups.end());
    for (int sz : it->second) CHECK(sz == 4);
  }
}

TEST_CASE("run_loop artifacts are identical for 1 and 16 workers") {
  std::string seeds = temp_dir("seeds_workers");
  write_seeds(seeds, 4, 37);
  Config cfg;
  cfg.seeds_path = seeds;
  cfg.out_dir = temp_dir("out_workers");
  cfg.iterations = 3;
  cfg.k = 4;
  cfg.sample_n = 3;
  cfg.backend = "toy";
  cfg.lr = 0.5;

  cfg.workers = 1;
  run_loop(cfg);
  std::string cur1 = slurp(cfg.out_dir + "/curriculum.jsonl");
  std::string traj1 = slurp(cfg.out_dir + "/trajectory.jsonl");
  std::string curve1 = slurp(cfg.out_dir + "/curve.csv");
  std::string pairs1 = slurp(cfg.out_dir + "/pairs.jsonl");

  cfg.workers = 16;
  run_loop(cfg);
  CHECK(slurp(cfg.out_dir + "/curriculum.jsonl") == cur1);
  CHECK(slurp(cfg.out_dir + "/trajectory.jsonl") == traj1);
  CHECK(slurp(cfg.out_dir + "/curve.csv") == curve1);
  CHECK(slurp(cfg.out_dir + "/pairs.jsonl") == pairs1);
  CHECK_FALSE(traj1.empty());
  CHECK_FALSE(pairs1.empty());
}

TEST_CASE("run_loop toy training shifts mass toward reference answers") {
  std::string seeds = temp_dir("seeds_toy");
  write_seeds(seeds, 3, 51);
  Config cfg;
  cfg.seeds_path = seeds;
  cfg.out_dir = temp_dir("out_toy");
  cfg.iterations = 20;
  cfg.k = 8;
  cfg.sample_n = 3;
  cfg.workers = 4;
  cfg.backend = "toy";
  cfg.lr = 0.5;
  auto art = run_loop(cfg);
  REQUIRE(art.curve.size() == 20);
  REQUIRE(art.policy.vocab.size() >= 20);
  // every problem that received gradient steps prefers its reference word
  int trained = 0;
  for (const auto& [pid, lg] : art.policy.logits) {
    const auto* p = art.final_curriculum.find(pid);
    if (!p || !p->reference_value) continue;
    bool touched = false;
    for (double v : lg)
      if (v != 0.0) touched = true;
    if (!touched) continue;
    ++trained;
    auto probs = art.policy.probs(pid);
    int ref = art.policy.vocab_index(dsl::format_number(*p->reference_value));
    REQUIRE(ref >= 0);
    CHECK(probs[size_t(ref)] > 1.0 / double(art.policy.vocab.size()));
  }
  CHECK(trained > 0);
}
