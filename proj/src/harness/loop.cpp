#include "geoloop/harness/loop.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "geoloop/dsl/parse.hpp"
#include "geoloop/dsl/print.hpp"
#include "geoloop/exec/evaluate.hpp"
#include "geoloop/gen/program_generator.hpp"
#include "geoloop/grpo/advantage.hpp"
#include "geoloop/render/instructions.hpp"
#include "geoloop/render/svg.hpp"
#include "geoloop/repi/diagnose.hpp"
#include "geoloop/repi/mutate.hpp"
#include "geoloop/harness/extract.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace geoloop::harness {

namespace {

constexpr const char* kInstructionsPreamble =
    "Redraw the figure from the numbered steps, then answer the question. "
    "Put the final answer in \\boxed{}.\n";

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Seed problems: every .geo file in the directory (sorted by filename);
// when no directory is configured, fall back to a generated corpus.
std::vector<curriculum::Problem> load_seeds(const Config& cfg) {
  std::vector<curriculum::Problem> seeds;
  if (cfg.seeds_path.empty()) {
    for (const auto& prog : gen::random_corpus(10, cfg.seed))
      seeds.push_back(curriculum::make_seed(prog));
    return seeds;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cfg.seeds_path))
    if (e.is_regular_file() && e.path().extension() == ".geo")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    seeds.push_back(curriculum::make_seed(dsl::parse(read_file(f))));
  return seeds;
}

std::string reference_word(const curriculum::Problem& p) {
  return dsl::format_number(p.reference_value.value_or(0.0));
}

// Grow the shared vocabulary; existing per-problem logits rows are padded
// so vocab and logits stay the same length.
void ensure_vocab(grpo::ToyPolicy& policy, const std::string& word) {
  if (policy.vocab_index(word) >= 0) return;
  policy.vocab.push_back(word);
  for (auto& [id, row] : policy.logits) row.push_back(0.0);
}

grpo::ToyPolicy build_toy_policy(const std::vector<curriculum::Problem>& seeds) {
  grpo::ToyPolicy policy;
  for (const auto& s : seeds)
    if (s.sampleable()) ensure_vocab(policy, reference_word(s));
  static const char* kDistractors[] = {"7",  "11", "13", "17", "19", "23", "29",
                                       "31", "37", "41", "43", "47", "53", "59",
                                       "61", "67", "71", "73", "79", "83"};
  for (const char* d : kDistractors) {
    if (policy.vocab.size() >= 20) break;
    ensure_vocab(policy, d);
  }
  for (const auto& s : seeds)
    if (s.sampleable()) policy.ensure(s.problem_id);
  return policy;
}

struct ProblemRun {
  curriculum::Problem problem;
  SolveRequest request;
  Reference reference;
  std::vector<SolveAttempt> attempts;  // slot-indexed, size k
};

SolveRequest build_request(const curriculum::Problem& p, const Config& cfg) {
  SolveRequest req;
  req.problem_id = p.problem_id;
  req.question_text = p.question_text;
  auto ex = exec::execute(p.program);
  req.instructions_text = std::string(kInstructionsPreamble) +
                          render::translate_instructions(p.program, ex.diagram)
                              .text();
  req.temperature = cfg.http_temperature;
  req.max_tokens = cfg.http_max_tokens;
  return req;
}

// Bounded worker pool over a flat (problem, attempt) task grid. Seeds and
// result slots are keyed by (iteration, problem index, attempt index), so
// the outcome is identical for any worker count.
void run_attempts(Backend& backend, std::vector<ProblemRun>& runs,
                  const Config& cfg, int iteration) {
  const int k = cfg.k;
  const size_t total = runs.size() * size_t(k);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t t = next.fetch_add(1);
      if (t >= total) return;
      size_t pi = t / size_t(k);
      int a = int(t % size_t(k));
      auto& run = runs[pi];
      SolveAttempt att;
      att.problem_id = run.request.problem_id;
      att.backend = backend.name();
      try {
        att.raw_text = backend.complete(
            run.request, grpo::mix_seed(cfg.seed, std::uint64_t(iteration), pi,
                                        std::uint64_t(a)));
        att.extracted = extract_answer(att.raw_text);
        att.reward = verify(att.extracted, run.reference);
      } catch (const AttemptError& e) {
        att.error = e.category;
      }
      run.attempts[size_t(a)] = std::move(att);
    }
  };
  int nthreads = std::max(1, std::min<int>(cfg.workers, int(total)));
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

nlohmann::json trajectory_entry(int iteration, const ProblemRun& run) {
  nlohmann::json rewards = nlohmann::json::array();
  nlohmann::json answers = nlohmann::json::array();
  for (const auto& a : run.attempts) {
    rewards.push_back(a.reward);
    if (!a.error.empty())
      answers.push_back(nlohmann::json{{"error", a.error}});
    else
      answers.push_back(a.extracted ? nlohmann::json(*a.extracted)
                                    : nlohmann::json(nullptr));
  }
  return {{"iteration", iteration},
          {"problem_id", run.request.problem_id},
          {"rewards", rewards},
          {"answers", answers}};
}

// All-fail group -> diagnose -> mutate/retry -> qualify -> render.
std::optional<curriculum::Problem> invent_from_failure(
    const ProblemRun& run, const Config& cfg, int iteration, size_t pi,
    const std::string& svg_dir) {
  const auto& parent = run.problem;
  auto ex = exec::execute(parent.program);
  auto solved = oracle::solve(parent.program, ex.diagram);
  if (solved.status != oracle::SolveStatus::Solved) return std::nullopt;

  std::vector<repi::Attempt> attempts;
  for (const auto& a : run.attempts) {
    repi::Attempt ra;
    ra.raw_text = a.raw_text;
    if (a.extracted) ra.value = numeric_value(*a.extracted);
    attempts.push_back(std::move(ra));
  }
  repi::Diagnosis diag;
  try {
    diag = repi::diagnose(parent.program, ex.diagram, attempts,
                          *solved.answer);
  } catch (const repi::NotAFailure&) {
    return std::nullopt;
  }
  repi::RetryResult retry;
  try {
    retry = repi::retry_loop(parent.program, diag,
                             grpo::mix_seed(cfg.seed, std::uint64_t(iteration),
                                            pi, 7777),
                             8);
  } catch (const repi::NoApplicableOperator&) {
    return std::nullopt;
  }
  if (!retry.candidate) return std::nullopt;

  auto child = curriculum::qualify(
      retry.candidate->second, parent.stage + 1,
      curriculum::Lineage{parent.problem_id, retry.candidate->first});
  if (child.status != curriculum::Status::Qualified) return std::nullopt;

  auto child_ex = exec::execute(child.program);
  std::string svg = render::render_svg(child.program, child_ex.diagram);
  fs::path path = fs::path(svg_dir) / (child.problem_id + ".svg");
  std::ofstream(path) << svg;
  child.svg_path = path.string();
  return child;
}

// One GRPO step on the toy policy for a sampled problem; returns the loss.
double toy_train_step(grpo::ToyPolicy& policy, const ProblemRun& run,
                      const Config& cfg) {
  const std::string& pid = run.request.problem_id;
  policy.ensure(pid);
  std::string ref_word = reference_word(run.problem);
  int ref_idx = policy.vocab_index(ref_word);
  if (ref_idx < 0) return 0.0;

  std::vector<int> attempt_idx, rewards;
  for (const auto& a : run.attempts) {
    if (!a.extracted) continue;
    int idx = policy.vocab_index(*a.extracted);
    if (idx < 0) continue;
    attempt_idx.push_back(idx);
    rewards.push_back(a.reward);
  }
  if (rewards.size() < 2) return 0.0;
  auto adv = grpo::advantages(rewards);
  auto sel = grpo::select_sets(rewards, true);
  int injected = sel.reference_injected ? ref_idx : -1;

  auto ref_probs = policy.probs(pid);
  auto& lg = policy.logits[pid];
  double loss = grpo::toy_loss_value(lg, ref_probs, attempt_idx,
                                     adv.advantages, injected, cfg.beta);
  auto grad = grpo::toy_loss_gradient(lg, ref_probs, attempt_idx,
                                      adv.advantages, injected, cfg.beta);
  for (size_t j = 0; j < lg.size(); ++j) lg[j] -= cfg.lr * grad[j];
  return loss;
}

}  // namespace

void export_pairs(const curriculum::Curriculum& c, const std::string& path) {
  std::ofstream out(path);
  for (const auto* p : c.sampleable()) {
    auto ex = exec::execute(p->program);
    nlohmann::json row{
        {"problem_id", p->problem_id},
        {"question", p->question_text},
        {"instructions",
         std::string(kInstructionsPreamble) +
             render::translate_instructions(p->program, ex.diagram).text()},
        {"svg_path", p->svg_path},
        {"answer", dsl::format_number(p->reference_value.value_or(0.0))},
    };
    out << row.dump() << "\n";
  }
}

LoopArtifacts run_loop(const Config& cfg, Backend* backend_override) {
  // Fail fast before creating any artifacts.
  std::unique_ptr<Backend> owned;
  grpo::ToyPolicy policy;
  bool train_toy = false;

  auto seeds = load_seeds(cfg);
  std::vector<curriculum::Problem> valid_seeds;
  for (auto& s : seeds)
    if (s.sampleable()) valid_seeds.push_back(std::move(s));
  if (valid_seeds.empty())
    throw curriculum::InsufficientProblems("no valid seed problems");

  Backend* backend = backend_override;
  if (!backend) {
    if (cfg.backend == "toy") {
      policy = build_toy_policy(valid_seeds);
      train_toy = true;
      owned = std::make_unique<ToyBackend>(&policy);
    } else if (cfg.backend == "scripted") {
      auto sb = std::make_unique<ScriptedBackend>();
      sb->fallback = cfg.scripted_fallback;
      owned = std::move(sb);
    } else {
      HttpConfig hc;
      hc.url = cfg.http_url;
      hc.model = cfg.http_model;
      hc.timeout_s = cfg.http_timeout_s;
      hc.max_tokens = cfg.http_max_tokens;
      hc.temperature = cfg.http_temperature;
      owned = std::make_unique<HttpBackend>(hc);
    }
    backend = owned.get();
  }
  backend->health_check();

  fs::create_directories(cfg.out_dir);
  std::string svg_dir = cfg.out_dir + "/svgs";
  fs::create_directories(svg_dir);

  curriculum::Curriculum cur;
  for (auto& s : valid_seeds) {
    if (s.svg_path.empty()) {
      auto ex = exec::execute(s.program);
      fs::path path = fs::path(svg_dir) / (s.problem_id + ".svg");
      std::ofstream(path) << render::render_svg(s.program, ex.diagram);
      s.svg_path = path.string();
    }
    cur.append(std::move(s));
  }

  curriculum::Store store(cfg.out_dir);
  store.save(cur);
  std::ofstream trajectory(cfg.out_dir + "/trajectory.jsonl");

  LoopArtifacts art;
  for (int t = 0; t < cfg.iterations; ++t) {
    int avail = int(cur.sampleable().size());
    auto sampled = curriculum::sample(cur, std::min(cfg.sample_n, avail),
                                      grpo::mix_seed(cfg.seed,
                                                     std::uint64_t(t), 0, 1));
    std::vector<ProblemRun> runs;
    for (const auto& p : sampled) {
      ProblemRun run;
      run.problem = p;
      run.request = build_request(p, cfg);
      run.reference = Reference::numeric(p.reference_value.value_or(0.0));
      run.attempts.resize(size_t(cfg.k));
      runs.push_back(std::move(run));
    }
    run_attempts(*backend, runs, cfg, t);

    std::vector<curriculum::AttemptGroup> groups;
    std::vector<curriculum::Problem> invented;
    for (size_t pi = 0; pi < runs.size(); ++pi) {
      const auto& run = runs[pi];
      trajectory << trajectory_entry(t, run).dump() << "\n";
      curriculum::AttemptGroup g;
      g.problem_id = run.request.problem_id;
      for (const auto& a : run.attempts) g.rewards.push_back(a.reward);
      bool all_fail = g.all_fail();
      groups.push_back(std::move(g));
      if (all_fail) {
        if (auto child = invent_from_failure(run, cfg, t, pi, svg_dir)) {
          if (!cur.contains(child->problem_id)) {
            if (train_toy) ensure_vocab(policy, reference_word(*child));
            invented.push_back(std::move(*child));
          }
        }
      }
    }
    art.invented_count += int(invented.size());
    cur = curriculum::update(cur, groups, invented);

    double loss_sum = 0.0;
    double reward_sum = 0.0;
    size_t reward_n = 0;
    for (const auto& run : runs) {
      if (train_toy) loss_sum += toy_train_step(policy, run, cfg);
      for (const auto& a : run.attempts) {
        reward_sum += a.reward;
        ++reward_n;
      }
    }
    grpo::CurvePoint pt;
    pt.iteration = t;
    pt.loss = runs.empty() ? 0.0 : loss_sum / double(runs.size());
    if (train_toy && !runs.empty()) {
      int hits = 0;
      for (size_t pi = 0; pi < runs.size(); ++pi) {
        const auto& run = runs[pi];
        int pick = policy.draw(
            run.request.problem_id,
            grpo::seed_uniform01(grpo::mix_seed(cfg.seed, std::uint64_t(t), pi,
                                                0xe7a1ULL)));
        if (policy.vocab.at(size_t(pick)) == reference_word(run.problem))
          ++hits;
      }
      pt.mean_at_1 = double(hits) / double(runs.size());
    } else {
      pt.mean_at_1 = reward_n == 0 ? 0.0 : reward_sum / double(reward_n);
    }
    art.curve.push_back(pt);
    store.maybe_save(cur);
  }

  store.save(cur);
  std::ofstream(cfg.out_dir + "/curve.csv") << grpo::curve_csv(art.curve);
  export_pairs(cur, cfg.out_dir + "/pairs.jsonl");
  art.final_curriculum = std::move(cur);
  if (train_toy) art.policy = std::move(policy);
  return art;
}

}  // namespace geoloop::harness
