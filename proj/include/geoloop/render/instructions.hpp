#pragma once

#include <string>
#include <vector>

#include "geoloop/exec/diagram.hpp"

namespace geoloop::render {

struct DrawingInstruction {
  std::vector<std::string> steps;  // numbered text lines, construction order

  std::string text() const {
    std::string out;
    for (size_t i = 0; i < steps.size(); ++i)
      out += std::to_string(i + 1) + ". " + steps[i] + "\n";
    return out;
  }
};

// Deterministic template translation: one step per drawable statement
// (ask/answer excluded), constraints stated as explicit numeric facts,
// coordinates to 6 significant digits.
DrawingInstruction translate_instructions(const dsl::ConstructionProgram& p,
                                          const exec::Diagram& d);

// Number of statements that produce an instruction step.
size_t drawable_count(const dsl::ConstructionProgram& p);

// Problem statement text shown to solvers: given facts plus the asked query.
std::string question_text(const dsl::ConstructionProgram& p);

}  // namespace geoloop::render
