#pragma once

#include <cstdint>
#include <vector>

#include "geoloop/dsl/ast.hpp"

namespace geoloop::gen {

// Families the generator draws from. Every emitted program executes to a
// valid, non-degenerate diagram and is solvable by the rule engine; all
// free() coordinates sit on grids that survive 6-significant-digit
// printing bit-exactly.
enum class Family {
  InscribedAngle,
  TriangleSum,
  Pythagoras,
  MidpointHalving,
  IsoscelesCentral,
};

dsl::ConstructionProgram make_program(Family family, std::uint64_t seed);

// Seeded uniform choice over all families.
dsl::ConstructionProgram random_solvable_program(std::uint64_t seed);

// n distinct programs (by program_id), seeds derived from `seed`.
std::vector<dsl::ConstructionProgram> random_corpus(int n, std::uint64_t seed);

}  // namespace geoloop::gen
