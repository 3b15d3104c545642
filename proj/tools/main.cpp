#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "geoloop/curriculum/store.hpp"
#include "geoloop/dsl/parse.hpp"
#include "geoloop/dsl/print.hpp"
#include "geoloop/exec/evaluate.hpp"
#include "geoloop/harness/backend.hpp"
#include "geoloop/harness/loop.hpp"
#include "geoloop/harness/metrics.hpp"
#include "geoloop/oracle/engine.hpp"
#include "geoloop/render/instructions.hpp"
#include "geoloop/render/svg.hpp"
#include "geoloop/repi/diagnose.hpp"
#include "geoloop/repi/mutate.hpp"

namespace {

using namespace geoloop;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

dsl::ConstructionProgram load_program(const std::string& path) {
  return dsl::parse(slurp(path));
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    std::ofstream(out_path) << content;
  }
}

int cmd_parse(const std::string& path) {
  auto p = load_program(path);
  std::cout << p.source_text;
  std::cout << "# program_id: " << p.program_id << "\n";
  return 0;
}

int cmd_exec(const std::string& path) {
  auto p = load_program(path);
  auto ex = exec::execute(p);
  nlohmann::json out{{"program_id", p.program_id},
                     {"valid", ex.report.valid()},
                     {"report", exec::to_json(ex.report)},
                     {"diagram", exec::to_json(ex.diagram)}};
  auto nd = exec::check_nondegeneracy(p, ex.diagram);
  out["nondegenerate"] = nd.valid();
  out["degeneracy_report"] = exec::to_json(nd);
  std::cout << out.dump(2) << "\n";
  return ex.report.valid() ? 0 : 1;
}

int cmd_render(const std::string& path, const std::string& out_path,
               bool instructions) {
  auto p = load_program(path);
  auto ex = exec::execute(p);
  if (!ex.report.valid()) {
    std::cerr << "construction is invalid; refusing to render\n";
    return 1;
  }
  if (instructions) {
    emit(out_path, render::translate_instructions(p, ex.diagram).text());
  } else {
    emit(out_path, render::render_svg(p, ex.diagram));
  }
  return 0;
}

int cmd_solve(const std::string& path) {
  auto p = load_program(path);
  auto ex = exec::execute(p);
  auto res = oracle::solve(p, ex.diagram);
  nlohmann::json out{{"program_id", p.program_id}};
  switch (res.status) {
    case oracle::SolveStatus::Solved: out["status"] = "Solved"; break;
    case oracle::SolveStatus::Unsolvable: out["status"] = "Unsolvable"; break;
    case oracle::SolveStatus::Inconsistent: out["status"] = "Inconsistent"; break;
  }
  if (!res.diagnostic.empty()) out["diagnostic"] = res.diagnostic;
  if (res.answer) {
    out["value"] = res.answer->value;
    out["unit"] =
        res.answer->unit == dsl::Unit::Degrees ? "deg" : "units";
    out["trace"] = oracle::to_json(res.answer->trace);
    out["cross_check"] = oracle::cross_check(*res.answer, ex.diagram);
  }
  std::cout << out.dump(2) << "\n";
  return res.status == oracle::SolveStatus::Solved ? 0 : 1;
}

int cmd_mutate(const std::string& path, const std::vector<double>& wrong,
               std::uint64_t seed, int budget) {
  auto p = load_program(path);
  auto ex = exec::execute(p);
  auto solved = oracle::solve(p, ex.diagram);
  if (solved.status != oracle::SolveStatus::Solved) {
    std::cerr << "parent problem is not solvable; nothing to diagnose\n";
    return 1;
  }
  std::vector<repi::Attempt> attempts;
  for (double v : wrong)
    attempts.push_back({dsl::format_number(v), v});
  auto diag = repi::diagnose(p, ex.diagram, attempts, *solved.answer);
  nlohmann::json tags = nlohmann::json::array();
  for (const auto& t : diag.tags) {
    nlohmann::json tj{{"kind", repi::tag_kind_name(t.kind)},
                      {"detail", t.detail}};
    if (t.given_index) tj["given_index"] = *t.given_index;
    tags.push_back(tj);
  }
  auto retry = repi::retry_loop(p, diag, seed, budget);
  nlohmann::json out{{"parent_id", p.program_id},
                     {"tags", tags},
                     {"candidates_tried", retry.tried}};
  if (retry.candidate) {
    out["mutation"] = repi::to_json(retry.candidate->first, p.program_id,
                                    retry.candidate->second.program_id);
    out["child_source"] = retry.candidate->second.source_text;
  } else {
    out["mutation"] = nullptr;
  }
  std::cout << out.dump(2) << "\n";
  return retry.candidate ? 0 : 1;
}

int cmd_qualify(const std::string& path, int stage) {
  auto p = load_program(path);
  auto prob = curriculum::qualify(std::move(p), stage, std::nullopt);
  std::cout << curriculum::to_json(prob).dump(2) << "\n";
  return prob.status == curriculum::Status::Qualified ? 0 : 1;
}

std::unique_ptr<harness::Backend> backend_from_config(
    const harness::Config& cfg, grpo::ToyPolicy& policy) {
  if (cfg.backend == "toy") return std::make_unique<harness::ToyBackend>(&policy);
  if (cfg.backend == "scripted") {
    auto sb = std::make_unique<harness::ScriptedBackend>();
    sb->fallback = cfg.scripted_fallback;
    return sb;
  }
  harness::HttpConfig hc;
  hc.url = cfg.http_url;
  hc.model = cfg.http_model;
  hc.timeout_s = cfg.http_timeout_s;
  hc.max_tokens = cfg.http_max_tokens;
  hc.temperature = cfg.http_temperature;
  return std::make_unique<harness::HttpBackend>(hc);
}

int cmd_eval(const std::string& config_path, const std::string& curriculum_dir) {
  auto cfg = harness::load_config(config_path);
  std::string dir = curriculum_dir.empty() ? cfg.out_dir : curriculum_dir;
  auto cur = curriculum::Store(dir).load();

  grpo::ToyPolicy policy;
  auto problems = cur.sampleable();
  for (const auto* p : problems) {
    std::string word = dsl::format_number(p->reference_value.value_or(0.0));
    if (policy.vocab_index(word) < 0) policy.vocab.push_back(word);
  }
  auto backend = backend_from_config(cfg, policy);
  backend->health_check();

  std::vector<std::vector<int>> matrix;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto* p : problems) {
    harness::SolveRequest req;
    req.problem_id = p->problem_id;
    req.question_text = p->question_text;
    auto ex = exec::execute(p->program);
    req.instructions_text = render::translate_instructions(p->program,
                                                           ex.diagram).text();
    auto attempts = harness::solve_problem(
        *backend, req, cfg.n_eval, cfg.seed,
        harness::Reference::numeric(p->reference_value.value_or(0.0)));
    std::vector<int> rewards;
    for (const auto& a : attempts) rewards.push_back(a.reward);
    matrix.push_back(rewards);
    rows.push_back({{"problem_id", p->problem_id}, {"rewards", rewards}});
  }
  auto rep = harness::mean_at_n(matrix);
  nlohmann::json out{{"n", cfg.n_eval},
                     {"mean_at_n", rep.mean_at_n},
                     {"problems", rows}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_score_genexam(const std::string& path) {
  auto j = nlohmann::json::parse(slurp(path));
  std::vector<harness::GenexamItem> items;
  for (const auto& e : j) {
    harness::GenexamItem it;
    it.c = e.at("c").get<double>();
    it.v_sp = e.at("v_sp").get<int>();
    it.v_lc = e.at("v_lc").get<int>();
    it.v_rd = e.at("v_rd").get<int>();
    items.push_back(it);
  }
  auto score = harness::genexam_scores(items);
  nlohmann::json out{{"strict_pct", score.strict_pct},
                     {"relaxed_pct", score.relaxed_pct},
                     {"relaxed_items", score.relaxed_items}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_run_loop(const std::string& config_path) {
  auto cfg = harness::load_config(config_path);
  auto art = harness::run_loop(cfg);
  nlohmann::json out{
      {"iterations", cfg.iterations},
      {"problems", art.final_curriculum.problems.size()},
      {"sampleable", art.final_curriculum.sampleable().size()},
      {"invented", art.invented_count},
      {"version", art.final_curriculum.version},
      {"out_dir", cfg.out_dir},
  };
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_export_pairs(const std::string& dir, const std::string& out_path) {
  auto cur = curriculum::Store(dir).load();
  harness::export_pairs(cur, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop geometric curriculum synthesis engine"};
  app.require_subcommand(1);

  std::string in_path, out_path, config_path, curriculum_dir;
  std::vector<double> wrong_values;
  std::uint64_t seed = 0;
  int stage = 0, budget = 8;
  bool instructions = false;

  auto* parse_cmd = app.add_subcommand("parse", "Parse and canonicalize a program");
  parse_cmd->add_option("file", in_path)->required();

  auto* exec_cmd = app.add_subcommand("exec", "Execute a program into a diagram");
  exec_cmd->add_option("file", in_path)->required();

  auto* render_cmd = app.add_subcommand("render", "Render a program to SVG");
  render_cmd->add_option("file", in_path)->required();
  render_cmd->add_option("-o,--out", out_path, "output path (default stdout)");
  render_cmd->add_flag("--instructions", instructions,
                       "emit drawing instructions instead of SVG");

  auto* solve_cmd = app.add_subcommand("solve", "Solve a program symbolically");
  solve_cmd->add_option("file", in_path)->required();

  auto* mutate_cmd =
      app.add_subcommand("mutate", "Diagnose wrong answers and invent a harder child");
  mutate_cmd->add_option("file", in_path)->required();
  mutate_cmd->add_option("--wrong", wrong_values, "wrong attempt values")
      ->required();
  mutate_cmd->add_option("--seed", seed);
  mutate_cmd->add_option("--budget", budget);

  auto* qualify_cmd = app.add_subcommand("qualify", "Run the admission gate");
  qualify_cmd->add_option("file", in_path)->required();
  qualify_cmd->add_option("--stage", stage);

  auto* eval_cmd = app.add_subcommand("eval", "Mean@N over a stored curriculum");
  eval_cmd->add_option("--config", config_path)->required();
  eval_cmd->add_option("--curriculum", curriculum_dir,
                       "curriculum directory (default: config out dir)");

  auto* genexam_cmd =
      app.add_subcommand("score-genexam", "Strict/relaxed scores for judged items");
  genexam_cmd->add_option("file", in_path)->required();

  auto* loop_cmd = app.add_subcommand("run-loop", "Run the closed loop");
  loop_cmd->add_option("--config", config_path)->required();

  auto* pairs_cmd =
      app.add_subcommand("export-pairs", "Export (instruction, image) pairs");
  pairs_cmd->add_option("--curriculum", curriculum_dir)->required();
  pairs_cmd->add_option("-o,--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse_cmd->parsed()) return cmd_parse(in_path);
    if (exec_cmd->parsed()) return cmd_exec(in_path);
    if (render_cmd->parsed()) return cmd_render(in_path, out_path, instructions);
    if (solve_cmd->parsed()) return cmd_solve(in_path);
    if (mutate_cmd->parsed())
      return cmd_mutate(in_path, wrong_values, seed, budget);
    if (qualify_cmd->parsed()) return cmd_qualify(in_path, stage);
    if (eval_cmd->parsed()) return cmd_eval(config_path, curriculum_dir);
    if (genexam_cmd->parsed()) return cmd_score_genexam(in_path);
    if (loop_cmd->parsed()) return cmd_run_loop(config_path);
    if (pairs_cmd->parsed()) return cmd_export_pairs(curriculum_dir, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
