#include "geoloop/curriculum/problem.hpp"

#include "geoloop/dsl/parse.hpp"
#include "geoloop/dsl/print.hpp"
#include "geoloop/exec/evaluate.hpp"
#include "geoloop/render/instructions.hpp"

namespace geoloop::curriculum {

namespace {

// Runs the full admission pipeline; on success fills the reference fields.
Problem gate(dsl::ConstructionProgram program, int stage,
             std::optional<Lineage> lineage, Status on_success) {
  Problem out;
  out.problem_id = program.program_id;
  out.stage = stage;
  out.lineage = std::move(lineage);

  auto reject = [&](const std::string& reason) {
    out.status = Status::Rejected;
    out.reject_reason = reason;
    out.program = std::move(program);
    return out;
  };

  auto ex = exec::execute(program);
  if (!ex.report.valid())
    return reject(exec::to_string(ex.report.violations.front().kind));
  auto degen = exec::check_nondegeneracy(program, ex.diagram);
  if (!degen.valid())
    return reject(exec::to_string(degen.violations.front().kind));
  auto solved = oracle::solve(program, ex.diagram);
  if (solved.status == oracle::SolveStatus::Inconsistent)
    return reject("Inconsistent");
  if (solved.status != oracle::SolveStatus::Solved)
    return reject("Unsolvable");
  if (!oracle::cross_check(*solved.answer, ex.diagram))
    return reject("CrossCheckFailed");

  out.status = on_success;
  out.question_text = render::question_text(program);
  out.reference_value = solved.answer->value;
  out.reference_unit = solved.answer->unit;
  out.derivation_trace = oracle::to_json(solved.answer->trace);
  out.program = std::move(program);
  return out;
}

}  // namespace

std::string status_name(Status s) {
  switch (s) {
    case Status::Seed: return "Seed";
    case Status::Invented: return "Invented";
    case Status::Qualified: return "Qualified";
    case Status::Rejected: return "Rejected";
  }
  return "?";
}

Problem qualify(dsl::ConstructionProgram program, int stage,
                std::optional<Lineage> lineage) {
  return gate(std::move(program), stage, std::move(lineage),
              Status::Qualified);
}

Problem make_seed(dsl::ConstructionProgram program) {
  return gate(std::move(program), 0, std::nullopt, Status::Seed);
}

nlohmann::json to_json(const Problem& p) {
  nlohmann::json j{
      {"problem_id", p.problem_id},
      {"program", p.program.source_text},
      {"question_text", p.question_text},
      {"svg_path", p.svg_path},
      {"stage", p.stage},
      {"status", status_name(p.status)},
  };
  if (p.reference_value) {
    j["reference"] = {
        {"value", *p.reference_value},
        {"unit", p.reference_unit == dsl::Unit::Degrees ? "deg" : "units"}};
    j["derivation_trace"] = p.derivation_trace;
  }
  if (p.status == Status::Rejected) j["reject_reason"] = p.reject_reason;
  if (p.lineage) {
    const auto& m = p.lineage->mutation;
    j["lineage"] = {{"parent_id", p.lineage->parent_id},
                    {"operator", repi::operator_name(m.op)},
                    {"targets", m.targets},
                    {"params", m.params},
                    {"seed", m.seed}};
  }
  return j;
}

Problem problem_from_json(const nlohmann::json& j) {
  Problem p;
  p.problem_id = j.at("problem_id").get<std::string>();
  p.program = dsl::parse(j.at("program").get<std::string>());
  p.question_text = j.value("question_text", std::string());
  p.svg_path = j.value("svg_path", std::string());
  p.stage = j.value("stage", 0);
  std::string st = j.at("status").get<std::string>();
  if (st == "Seed") p.status = Status::Seed;
  else if (st == "Invented") p.status = Status::Invented;
  else if (st == "Qualified") p.status = Status::Qualified;
  else p.status = Status::Rejected;
  p.reject_reason = j.value("reject_reason", std::string());
  if (j.contains("reference")) {
    p.reference_value = j["reference"].at("value").get<double>();
    p.reference_unit = j["reference"].at("unit") == "deg" ? dsl::Unit::Degrees
                                                          : dsl::Unit::Length;
    p.derivation_trace = j.value("derivation_trace", nlohmann::json());
  }
  if (j.contains("lineage")) {
    Lineage l;
    l.parent_id = j["lineage"].at("parent_id").get<std::string>();
    auto op = repi::operator_from_name(
        j["lineage"].at("operator").get<std::string>());
    if (op) l.mutation.op = *op;
    l.mutation.targets =
        j["lineage"].value("targets", std::vector<std::string>{});
    l.mutation.params =
        j["lineage"].value("params", std::map<std::string, double>{});
    l.mutation.seed = j["lineage"].value("seed", std::uint64_t(0));
    p.lineage = std::move(l);
  }
  return p;
}

}  // namespace geoloop::curriculum
