#pragma once

#include "ariel/ast.h"
#include "ariel/lexer.h"

namespace ariel {

struct ParseResult {
  Script script;
  std::vector<LexEvent> events;  // section-ok notes and syntax errors
  int errors = 0;
};

// Consumes the token stream. Syntax errors recover at the next newline,
// mirroring the grammar's error production.
ParseResult parse(const std::vector<Token>& tokens, const std::string& filename);

}  // namespace ariel
