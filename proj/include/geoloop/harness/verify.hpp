#pragma once

#include <optional>
#include <string>

namespace geoloop::harness {

// Ground truth for one problem: a choice letter or a numeric value.
struct Reference {
  enum class Kind { Choice, Numeric };
  Kind kind = Kind::Numeric;
  std::string choice;   // Choice kind
  double value = 0.0;   // Numeric kind

  static Reference numeric(double v) { return {Kind::Numeric, "", v}; }
  static Reference letter(std::string c) {
    return {Kind::Choice, std::move(c), 0.0};
  }
};

// Semantic verification: case-insensitive letters,
// unit-agnostic numerics (strips degrees/deg/°/cm/units), tolerance
// relative 1e-6 / absolute 1e-9. Unparseable extractions score 0.
int verify(const std::optional<std::string>& extracted, const Reference& ref);

// Convenience: numeric value of an extracted answer after unit stripping.
std::optional<double> numeric_value(const std::string& extracted);

}  // namespace geoloop::harness
