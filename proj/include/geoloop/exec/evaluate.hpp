#pragma once

#include <stdexcept>

#include "geoloop/exec/diagram.hpp"

namespace geoloop::exec {

// Tolerances of the given-assertion contract.
inline constexpr double kAngleTolDeg = 1e-6;
inline constexpr double kLengthRelTol = 1e-9;

struct DegeneracyPolicy {
  double min_separation = 1e-3;  // abstract units
  double min_angle_deg = 1.0;
};

class MeasureError : public std::runtime_error {
 public:
  enum class Kind { UnknownIdentifier, DegenerateAngle };
  MeasureError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind(kind) {}
  Kind kind;
};

struct ExecResult {
  Diagram diagram;
  ValidityReport report;
};

// Evaluates statements in order. Violations are collected, never thrown;
// points whose construction failed stay absent and dependents are skipped.
// Bit-deterministic: same program, same coordinates.
ExecResult execute(const dsl::ConstructionProgram& p);

// Unsigned angle at vertex b in [0, 180] degrees / Euclidean distance.
double measure(const Diagram& d, const dsl::Query& q);

double angle_deg(Vec2 a, Vec2 vertex, Vec2 c);
double dist(Vec2 a, Vec2 b);

// Degeneracy-only checks: close point pairs, tiny angles at marked
// vertices (those named in given/ask), near-coincident circles.
ValidityReport check_nondegeneracy(const dsl::ConstructionProgram& p,
                                   const Diagram& d,
                                   const DegeneracyPolicy& policy = {});

}  // namespace geoloop::exec
