#include "geoloop/repi/mutate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "geoloop/dsl/parse.hpp"
#include "geoloop/dsl/print.hpp"
#include "geoloop/exec/evaluate.hpp"

namespace geoloop::repi {

namespace {

using dsl::ConstructionProgram;
using dsl::Statement;

size_t ask_index(const std::vector<Statement>& sts) {
  for (size_t i = 0; i < sts.size(); ++i)
    if (std::holds_alternative<dsl::Ask>(sts[i])) return i;
  return sts.size();
}

std::set<std::string> point_names(const ConstructionProgram& p) {
  std::set<std::string> out;
  for (const auto& s : p.statements)
    if (auto* pd = std::get_if<dsl::PointDef>(&s)) out.insert(pd->name);
  return out;
}

std::string fresh_name(std::set<std::string>& used) {
  for (char c : std::string("PQRSTUVWXYZ")) {
    std::string n(1, c);
    if (used.insert(n).second) return n;
  }
  for (int i = 1;; ++i) {
    std::string n = "N" + std::to_string(i);
    if (used.insert(n).second) return n;
  }
}

double norm_theta(double t) {
  t = std::fmod(t, 360.0);
  if (t < 0) t += 360.0;
  return t;
}

double arc_gap(double a, double b) {
  double d = std::fabs(norm_theta(a) - norm_theta(b));
  return std::min(d, 360.0 - d);
}

struct CircleView {
  std::string name;
  std::string center;
  std::vector<std::pair<std::string, double>> thetas;  // on_circle points
};

std::vector<CircleView> circles_of(const ConstructionProgram& p) {
  std::vector<CircleView> out;
  for (const auto& s : p.statements)
    if (auto* cd = std::get_if<dsl::CircleDef>(&s))
      out.push_back({cd->name, cd->center, {}});
  for (const auto& s : p.statements)
    if (auto* pd = std::get_if<dsl::PointDef>(&s))
      if (auto* oc = std::get_if<dsl::OnCircleCtor>(&pd->ctor))
        for (auto& cv : out)
          if (cv.name == oc->circle)
            cv.thetas.push_back({pd->name, norm_theta(oc->theta_deg)});
  return out;
}

std::set<std::pair<std::string, std::string>> segment_set(
    const ConstructionProgram& p) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& s : p.statements)
    if (auto* sd = std::get_if<dsl::SegmentDef>(&s))
      out.insert(std::minmax(sd->a, sd->b));
  return out;
}

const dsl::Given* nth_given(const ConstructionProgram& p, int index) {
  int idx = -1;
  for (const auto& s : p.statements)
    if (auto* g = std::get_if<dsl::Given>(&s))
      if (++idx == index) return g;
  return nullptr;
}

// ---- candidate generation (parameters only; bodies built by replay) ------

struct Ctx {
  const ConstructionProgram& p;
  const exec::Diagram& diagram;
  std::vector<CircleView> circles;
  std::set<std::pair<std::string, std::string>> segments;
  std::vector<std::string> points;  // sorted
  std::mt19937_64 rng;
};

int pick(Ctx& c, int n) {
  return int(std::uniform_int_distribution<int>(0, n - 1)(c.rng));
}

std::optional<Mutation> gen_add_point_on_circle(Ctx& c) {
  if (c.circles.empty()) return std::nullopt;
  const auto& cv = c.circles[pick(c, int(c.circles.size()))];
  for (int tries = 0; tries < 64; ++tries) {
    double theta = 5.0 * pick(c, 72);
    bool ok = true;
    for (const auto& [n, t] : cv.thetas)
      if (arc_gap(theta, t) < 20.0) ok = false;
    if (!ok) continue;
    std::set<std::string> used = point_names(c.p);
    Mutation m;
    m.op = Operator::AddPointOnCircle;
    m.targets = {cv.name, fresh_name(used)};
    m.params["theta"] = theta;
    return m;
  }
  return std::nullopt;
}

std::optional<Mutation> gen_add_chord(Ctx& c) {
  std::vector<std::pair<std::string, std::string>> options;
  for (const auto& cv : c.circles)
    for (size_t i = 0; i < cv.thetas.size(); ++i)
      for (size_t j = i + 1; j < cv.thetas.size(); ++j) {
        auto key = std::minmax(cv.thetas[i].first, cv.thetas[j].first);
        if (!c.segments.count(key)) options.push_back(key);
      }
  if (options.empty()) return std::nullopt;
  auto [a, b] = options[pick(c, int(options.size()))];
  Mutation m;
  m.op = Operator::AddChord;
  m.targets = {a, b};
  return m;
}

std::optional<Mutation> gen_add_midpoint(Ctx& c) {
  // prefer existing segments; avoid midpoints colliding with known points
  std::vector<std::pair<std::string, std::string>> options(c.segments.begin(),
                                                           c.segments.end());
  if (options.empty() && c.points.size() >= 2)
    for (size_t i = 0; i < c.points.size(); ++i)
      for (size_t j = i + 1; j < c.points.size(); ++j)
        options.push_back({c.points[i], c.points[j]});
  std::vector<std::pair<std::string, std::string>> safe;
  for (const auto& [a, b] : options) {
    if (!c.diagram.has_point(a) || !c.diagram.has_point(b)) continue;
    exec::Vec2 mid = 0.5 * (c.diagram.points.at(a) + c.diagram.points.at(b));
    bool clear = true;
    for (const auto& [n, v] : c.diagram.points)
      if (exec::dist(mid, v) < 1e-2) clear = false;
    if (clear) safe.push_back({a, b});
  }
  if (safe.empty()) return std::nullopt;
  auto [a, b] = safe[pick(c, int(safe.size()))];
  std::set<std::string> used = point_names(c.p);
  Mutation m;
  m.op = Operator::AddMidpoint;
  m.targets = {a, b, fresh_name(used)};
  return m;
}

std::optional<Mutation> gen_add_foot(Ctx& c) {
  std::vector<std::array<std::string, 3>> options;
  for (const auto& fp : c.points)
    for (const auto& [a, b] : c.segments) {
      if (fp == a || fp == b) continue;
      if (!c.diagram.has_point(fp) || !c.diagram.has_point(a) ||
          !c.diagram.has_point(b))
        continue;
      exec::Vec2 pa = c.diagram.points.at(a);
      exec::Vec2 pb = c.diagram.points.at(b);
      exec::Vec2 pp = c.diagram.points.at(fp);
      exec::Vec2 dir = pb - pa;
      double len2 = dir.x * dir.x + dir.y * dir.y;
      if (len2 < 1e-12) continue;
      double t = ((pp.x - pa.x) * dir.x + (pp.y - pa.y) * dir.y) / len2;
      exec::Vec2 foot = pa + t * dir;
      if (exec::dist(foot, pp) < 1e-2) continue;  // point already on line
      bool clear = true;
      for (const auto& [n, v] : c.diagram.points)
        if (exec::dist(foot, v) < 1e-2) clear = false;
      if (clear) options.push_back({fp, a, b});
    }
  if (options.empty()) return std::nullopt;
  auto [fp, a, b] = options[pick(c, int(options.size()))];
  std::set<std::string> used = point_names(c.p);
  Mutation m;
  m.op = Operator::AddPerpendicularFoot;
  m.targets = {fp, a, b, fresh_name(used)};
  return m;
}

std::optional<Mutation> gen_perturb_given_angle(Ctx& c, int given_index) {
  const dsl::Given* g = nth_given(c.p, given_index);
  if (!g) return std::nullopt;
  auto* ang = std::get_if<dsl::AngleAssert>(&g->assertion);
  if (!ang) return std::nullopt;
  // repairable case: central angle at a circle center between two on_circle
  // points of that circle — the later endpoint's theta absorbs the delta
  for (const auto& cv : c.circles) {
    if (cv.center != ang->b) continue;
    std::optional<double> t1, t2;
    for (const auto& [n, t] : cv.thetas) {
      if (n == ang->a) t1 = t;
      if (n == ang->c) t2 = t;
    }
    if (!t1 || !t2) continue;
    static const double deltas[] = {-20, -15, -10, -5, 5, 10, 15, 20};
    int start = pick(c, 8);
    for (int k = 0; k < 8; ++k) {
      double delta = deltas[(start + k) % 8];
      double nv = ang->value_deg + delta;
      if (nv < 20.0 || nv > 160.0) continue;
      double fwd = norm_theta(*t2 - *t1);
      double nt = (fwd <= 180.0) ? norm_theta(*t1 + nv) : norm_theta(*t1 - nv);
      bool clear = true;
      for (const auto& [n, t] : cv.thetas)
        if (n != ang->c && arc_gap(nt, t) < 20.0) clear = false;
      if (!clear) continue;
      Mutation m;
      m.op = Operator::PerturbGivenAngle;
      m.targets = {ang->c};
      m.params["given_index"] = given_index;
      m.params["delta"] = delta;
      m.params["new_theta"] = nt;
      return m;
    }
  }
  return std::nullopt;
}

std::optional<Mutation> gen_inscribe_polygon(Ctx& c) {
  if (c.circles.empty()) return std::nullopt;
  const auto& cv = c.circles[pick(c, int(c.circles.size()))];
  int n = 3 + pick(c, 3);
  double theta0 = 5.0 * pick(c, 72);
  std::set<std::string> used = point_names(c.p);
  Mutation m;
  m.op = Operator::InscribePolygon;
  m.targets = {cv.name};
  for (int i = 0; i < n; ++i) m.targets.push_back(fresh_name(used));
  m.params["n"] = n;
  m.params["theta0"] = theta0;
  return m;
}

std::optional<Mutation> gen_swap_asked_query(Ctx& c, int given_index) {
  // enumerate angle queries, keep those the oracle solves with a trace that
  // depends on the targeted given
  std::vector<std::array<std::string, 3>> queries;
  for (const auto& a : c.points)
    for (const auto& b : c.points)
      for (const auto& d : c.points) {
        if (a == b || b == d || a >= d) continue;
        queries.push_back({a, b, d});
      }
  // seeded order
  for (size_t i = queries.size(); i > 1; --i)
    std::swap(queries[i - 1], queries[size_t(pick(c, int(i)))]);
  const dsl::Ask* cur = c.p.ask();
  for (const auto& [a, b, d] : queries) {
    dsl::AngleQuery q{a, b, d};
    if (cur && std::holds_alternative<dsl::AngleQuery>(cur->query) &&
        std::get<dsl::AngleQuery>(cur->query) == q)
      continue;
    auto sts = c.p.statements;
    sts[ask_index(sts)] = dsl::Ask{q};
    auto child = dsl::finalize(std::move(sts));
    auto ex = exec::execute(child);
    if (!ex.report.valid()) continue;
    if (!exec::check_nondegeneracy(child, ex.diagram).valid()) continue;
    auto r = oracle::solve(child, ex.diagram);
    if (r.status != oracle::SolveStatus::Solved) continue;
    if (!r.answer->trace.uses_given(given_index)) continue;
    Mutation m;
    m.op = Operator::SwapAskedQuery;
    m.targets = {a, b, d};
    m.params["is_angle"] = 1;
    return m;
  }
  return std::nullopt;
}

std::vector<Operator> operators_for(const Tag& t) {
  switch (t.kind) {
    case TagKind::MissedGiven:
      return {Operator::PerturbGivenAngle, Operator::SwapAskedQuery};
    case TagKind::WrongTheorem:
      if (t.detail == "inscribed-angle")
        return {Operator::AddPointOnCircle, Operator::AddChord};
      return {Operator::InscribePolygon, Operator::AddMidpoint};
    case TagKind::StructureAssumed:
      return {Operator::AddPerpendicularFoot, Operator::AddChord};
    case TagKind::ArithmeticSlip:
    case TagKind::Unparseable:
      return {Operator::InscribePolygon, Operator::AddMidpoint};
  }
  return {};
}

}  // namespace

std::string operator_name(Operator op) {
  switch (op) {
    case Operator::AddPointOnCircle: return "AddPointOnCircle";
    case Operator::AddChord: return "AddChord";
    case Operator::AddMidpoint: return "AddMidpoint";
    case Operator::AddPerpendicularFoot: return "AddPerpendicularFoot";
    case Operator::PerturbGivenAngle: return "PerturbGivenAngle";
    case Operator::InscribePolygon: return "InscribePolygon";
    case Operator::SwapAskedQuery: return "SwapAskedQuery";
  }
  return "?";
}

std::optional<Operator> operator_from_name(const std::string& name) {
  for (Operator op : {Operator::AddPointOnCircle, Operator::AddChord,
                      Operator::AddMidpoint, Operator::AddPerpendicularFoot,
                      Operator::PerturbGivenAngle, Operator::InscribePolygon,
                      Operator::SwapAskedQuery})
    if (operator_name(op) == name) return op;
  return std::nullopt;
}

nlohmann::json to_json(const Mutation& m, const std::string& parent_id,
                       const std::string& child_id) {
  return nlohmann::json{{"parent_id", parent_id},
                        {"child_id", child_id},
                        {"operator", operator_name(m.op)},
                        {"targets", m.targets},
                        {"params", m.params},
                        {"seed", m.seed}};
}

dsl::ConstructionProgram apply_mutation(const dsl::ConstructionProgram& p,
                                        const Mutation& m) {
  auto sts = p.statements;
  size_t at = ask_index(sts);
  switch (m.op) {
    case Operator::AddPointOnCircle:
      sts.insert(sts.begin() + at,
                 dsl::PointDef{m.targets.at(1),
                               dsl::OnCircleCtor{m.targets.at(0),
                                                 m.params.at("theta")}});
      break;
    case Operator::AddChord:
      sts.insert(sts.begin() + at,
                 dsl::SegmentDef{m.targets.at(0), m.targets.at(1)});
      break;
    case Operator::AddMidpoint:
      sts.insert(sts.begin() + at,
                 dsl::PointDef{m.targets.at(2),
                               dsl::MidpointCtor{m.targets.at(0),
                                                 m.targets.at(1)}});
      break;
    case Operator::AddPerpendicularFoot:
      sts.insert(sts.begin() + at,
                 dsl::PointDef{m.targets.at(3),
                               dsl::FootCtor{m.targets.at(0), m.targets.at(1),
                                             m.targets.at(2)}});
      break;
    case Operator::PerturbGivenAngle: {
      int gi = int(m.params.at("given_index"));
      int idx = -1;
      for (auto& s : sts) {
        auto* g = std::get_if<dsl::Given>(&s);
        if (!g) continue;
        if (++idx != gi) continue;
        auto& ang = std::get<dsl::AngleAssert>(g->assertion);
        ang.value_deg += m.params.at("delta");
        break;
      }
      if (!m.targets.empty()) {
        for (auto& s : sts)
          if (auto* pd = std::get_if<dsl::PointDef>(&s))
            if (pd->name == m.targets.at(0))
              std::get<dsl::OnCircleCtor>(pd->ctor).theta_deg =
                  m.params.at("new_theta");
      }
      break;
    }
    case Operator::InscribePolygon: {
      int n = int(m.params.at("n"));
      double theta0 = m.params.at("theta0");
      std::vector<Statement> add;
      for (int i = 0; i < n; ++i)
        add.push_back(dsl::PointDef{
            m.targets.at(size_t(i) + 1),
            dsl::OnCircleCtor{m.targets.at(0),
                              norm_theta(theta0 + 360.0 * i / n)}});
      for (int i = 0; i < n; ++i)
        add.push_back(dsl::SegmentDef{m.targets.at(size_t(i) + 1),
                                      m.targets.at(size_t((i + 1) % n) + 1)});
      sts.insert(sts.begin() + at, add.begin(), add.end());
      break;
    }
    case Operator::SwapAskedQuery: {
      dsl::Query q;
      if (m.params.count("is_angle") && m.params.at("is_angle") != 0)
        q = dsl::AngleQuery{m.targets.at(0), m.targets.at(1), m.targets.at(2)};
      else
        q = dsl::DistQuery{m.targets.at(0), m.targets.at(1)};
      sts[at] = dsl::Ask{q};
      break;
    }
  }
  return dsl::finalize(std::move(sts));
}

std::vector<std::pair<Mutation, dsl::ConstructionProgram>> invent(
    const dsl::ConstructionProgram& p, const Diagnosis& diag,
    std::uint64_t rng_seed, int max_candidates) {
  if (diag.tags.empty()) throw std::invalid_argument("empty diagnosis");

  auto ex = exec::execute(p);
  Ctx ctx{p, ex.diagram, circles_of(p), segment_set(p), {},
          std::mt19937_64(rng_seed)};
  for (const auto& n : point_names(p)) ctx.points.push_back(n);

  std::vector<std::pair<Mutation, dsl::ConstructionProgram>> out;
  std::set<std::string> seen_ids{p.program_id};
  bool any_applicable = false;

  auto try_gen = [&](const Tag& tag, Operator op) {
    if (int(out.size()) >= max_candidates) return;
    std::optional<Mutation> m;
    switch (op) {
      case Operator::AddPointOnCircle: m = gen_add_point_on_circle(ctx); break;
      case Operator::AddChord: m = gen_add_chord(ctx); break;
      case Operator::AddMidpoint: m = gen_add_midpoint(ctx); break;
      case Operator::AddPerpendicularFoot: m = gen_add_foot(ctx); break;
      case Operator::PerturbGivenAngle:
        if (tag.given_index) m = gen_perturb_given_angle(ctx, *tag.given_index);
        break;
      case Operator::InscribePolygon: m = gen_inscribe_polygon(ctx); break;
      case Operator::SwapAskedQuery:
        if (tag.given_index) m = gen_swap_asked_query(ctx, *tag.given_index);
        break;
    }
    if (!m) return;
    any_applicable = true;
    m->seed = rng_seed;
    auto child = apply_mutation(p, *m);
    if (!seen_ids.insert(child.program_id).second) return;
    // every candidate must parse back from its canonical print
    auto reparsed = dsl::parse(child.source_text);
    if (!(reparsed == child)) return;
    // targetedness: MissedGiven children must still derive through the given
    if (tag.kind == TagKind::MissedGiven && tag.given_index) {
      auto cx = exec::execute(child);
      if (!cx.report.valid()) return;
      auto r = oracle::solve(child, cx.diagram);
      if (r.status != oracle::SolveStatus::Solved) return;
      if (!r.answer->trace.uses_given(*tag.given_index)) return;
    }
    out.push_back({std::move(*m), std::move(child)});
  };

  // round-robin over tags/operators until the cap; bounded passes keep the
  // enumeration finite when generators run dry
  for (int pass = 0; pass < max_candidates && int(out.size()) < max_candidates;
       ++pass) {
    size_t before = out.size();
    for (const auto& tag : diag.tags)
      for (Operator op : operators_for(tag)) try_gen(tag, op);
    if (out.size() == before && any_applicable) break;
    if (out.size() == before && !any_applicable) break;
  }

  if (!any_applicable)
    throw NoApplicableOperator("no mutation operator applies to this program");
  return out;
}

RetryResult retry_loop(const dsl::ConstructionProgram& p, const Diagnosis& diag,
                       std::uint64_t rng_seed, int budget) {
  RetryResult res;
  auto candidates = invent(p, diag, rng_seed, budget);
  for (auto& [m, child] : candidates) {
    if (res.tried >= budget) break;
    ++res.tried;
    auto ex = exec::execute(child);
    if (!ex.report.valid()) continue;
    if (!exec::check_nondegeneracy(child, ex.diagram).valid()) continue;
    if (oracle::solve(child, ex.diagram).status != oracle::SolveStatus::Solved)
      continue;
    res.candidate = {std::move(m), std::move(child)};
    return res;
  }
  return res;
}

}  // namespace geoloop::repi
