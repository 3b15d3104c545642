#include "geoloop/gen/program_generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "geoloop/dsl/print.hpp"

namespace geoloop::gen {

using namespace dsl;

namespace {

// Three circle angles on a 5-degree grid with every pairwise arc >= 20.
std::array<double, 3> spread_thetas(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 71);
  while (true) {
    double a = 5.0 * pick(rng);
    double b = 5.0 * pick(rng);
    double c = 5.0 * pick(rng);
    std::array<double, 3> t{a, b, c};
    std::array<double, 3> s = t;
    std::sort(s.begin(), s.end());
    double a01 = s[1] - s[0];
    double a12 = s[2] - s[1];
    double a20 = 360.0 - s[2] + s[0];
    if (a01 >= 20 && a12 >= 20 && a20 >= 20) return t;
  }
}

double arc_between(double lo, double hi) { return hi - lo; }

double circle_radius(std::mt19937_64& rng) {
  static const double radii[] = {1.0, 1.5, 2.0, 2.5, 3.0};
  return radii[std::uniform_int_distribution<int>(0, 4)(rng)];
}

ConstructionProgram inscribed_angle(std::mt19937_64& rng) {
  double r = circle_radius(rng);
  std::array<double, 3> t{};
  double central = 0.0;
  do {
    // central = 180 would put A, O, D on a line (degenerate given angle)
    t = spread_thetas(rng);
    double delta = std::fmod(std::fabs(t[0] - t[1]), 360.0);
    central = std::min(delta, 360.0 - delta);
  } while (central == 180.0);
  std::vector<Statement> sts{
      PointDef{"O", FreeCtor{0, 0}},
      CircleDef{"K", "O", RadiusValue{r}},
      PointDef{"A", OnCircleCtor{"K", t[0]}},
      PointDef{"D", OnCircleCtor{"K", t[1]}},
      PointDef{"P", OnCircleCtor{"K", t[2]}},
      SegmentDef{"A", "P"},
      SegmentDef{"D", "P"},
      Given{AngleAssert{"A", "O", "D", central}},
      Ask{AngleQuery{"A", "P", "D"}},
  };
  return finalize(std::move(sts));
}

ConstructionProgram triangle_sum(std::mt19937_64& rng) {
  auto t = spread_thetas(rng);
  double r = circle_radius(rng);
  std::array<double, 3> s = t;
  std::sort(s.begin(), s.end());
  // Vertex angle = half the opposite arc.
  auto angle_at = [&](double theta) {
    double lo = s[0], mid = s[1], hi = s[2];
    if (theta == lo) return arc_between(mid, hi) / 2.0;
    if (theta == mid) return (360.0 - hi + lo) / 2.0;
    return arc_between(lo, mid) / 2.0;
  };
  std::vector<Statement> sts{
      PointDef{"O", FreeCtor{0, 0}},
      CircleDef{"K", "O", RadiusValue{r}},
      PointDef{"A", OnCircleCtor{"K", t[0]}},
      PointDef{"B", OnCircleCtor{"K", t[1]}},
      PointDef{"C", OnCircleCtor{"K", t[2]}},
      SegmentDef{"A", "B"},
      SegmentDef{"B", "C"},
      SegmentDef{"A", "C"},
      Given{AngleAssert{"B", "A", "C", angle_at(t[0])}},
      Given{AngleAssert{"A", "B", "C", angle_at(t[1])}},
      Ask{AngleQuery{"A", "C", "B"}},
  };
  return finalize(std::move(sts));
}

ConstructionProgram pythagoras(std::mt19937_64& rng) {
  static const double legs[] = {1.5, 2.0, 2.5, 3.0, 4.0, 5.0};
  std::uniform_int_distribution<int> pick(0, 5);
  double a = legs[pick(rng)];
  double b = legs[pick(rng)];
  std::vector<Statement> sts{
      PointDef{"A", FreeCtor{0, 0}},
      PointDef{"B", FreeCtor{a, 0}},
      PointDef{"C", FreeCtor{0, b}},
      SegmentDef{"A", "B"},
      SegmentDef{"A", "C"},
      SegmentDef{"B", "C"},
      Given{AngleAssert{"B", "A", "C", 90}},
      Given{DistAssert{"A", "B", a}},
      Given{DistAssert{"A", "C", b}},
      Ask{DistQuery{"B", "C"}},
  };
  return finalize(std::move(sts));
}

ConstructionProgram midpoint_halving(std::mt19937_64& rng) {
  // Integer-hypotenuse pairs keep the given length exact at 6 digits.
  static const std::array<std::array<double, 3>, 5> triples{
      {{3, 4, 5}, {6, 8, 10}, {5, 12, 13}, {8, 15, 17}, {9, 12, 15}}};
  auto [x, y, d] = triples[std::uniform_int_distribution<int>(0, 4)(rng)];
  std::vector<Statement> sts{
      PointDef{"A", FreeCtor{0, 0}},
      PointDef{"B", FreeCtor{x, y}},
      PointDef{"M", MidpointCtor{"A", "B"}},
      SegmentDef{"A", "B"},
      Given{DistAssert{"A", "B", d}},
      Ask{DistQuery{"A", "M"}},
  };
  return finalize(std::move(sts));
}

ConstructionProgram isosceles_central(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(4, 32);  // central 20..160
  double central = 5.0 * pick(rng);
  double r = circle_radius(rng);
  double base = 5.0 * std::uniform_int_distribution<int>(0, 71)(rng);
  std::vector<Statement> sts{
      PointDef{"O", FreeCtor{0, 0}},
      CircleDef{"K", "O", RadiusValue{r}},
      PointDef{"A", OnCircleCtor{"K", base}},
      PointDef{"B", OnCircleCtor{"K", base + central}},
      SegmentDef{"O", "A"},
      SegmentDef{"O", "B"},
      SegmentDef{"A", "B"},
      Given{AngleAssert{"A", "O", "B", central}},
      Ask{AngleQuery{"O", "A", "B"}},
  };
  return finalize(std::move(sts));
}

}  // namespace

ConstructionProgram make_program(Family family, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  switch (family) {
    case Family::InscribedAngle: return inscribed_angle(rng);
    case Family::TriangleSum: return triangle_sum(rng);
    case Family::Pythagoras: return pythagoras(rng);
    case Family::MidpointHalving: return midpoint_halving(rng);
    case Family::IsoscelesCentral: return isosceles_central(rng);
  }
  return inscribed_angle(rng);
}

ConstructionProgram random_solvable_program(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto family = Family(std::uniform_int_distribution<int>(0, 4)(rng));
  return make_program(family, rng());
}

std::vector<ConstructionProgram> random_corpus(int n, std::uint64_t seed) {
  std::vector<ConstructionProgram> out;
  std::set<std::string> seen;
  std::mt19937_64 rng(seed);
  while (int(out.size()) < n) {
    auto p = random_solvable_program(rng());
    if (seen.insert(p.program_id).second) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace geoloop::gen
