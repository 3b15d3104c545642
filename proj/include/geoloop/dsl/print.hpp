#pragma once

#include <string>

#include "geoloop/dsl/ast.hpp"

namespace geoloop::dsl {

// Canonical text form: one statement per line, numbers printed with 6
// significant digits and no trailing zeros. parse(print(p)) == p.
std::string print(const ConstructionProgram& p);
std::string print(const Statement& s);
std::string print(const Query& q);
std::string print(const Assertion& a);

// 6-significant-digit numeric formatting shared by printer, renderer
// and instruction templates.
std::string format_number(double v);

// FNV-1a over the canonical printed form, as 16 hex digits. Cosmetic
// edits to the source never fork the id.
std::string program_hash(const ConstructionProgram& p);

// Convenience: rebuild program_id and source_text from the statement list.
ConstructionProgram finalize(std::vector<Statement> statements);

}  // namespace geoloop::dsl
