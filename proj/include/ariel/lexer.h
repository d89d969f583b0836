#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ariel {

struct Token {
  enum class Type { number, real, string, ident, sym, those, newline, eof };
  Type type = Type::eof;
  std::string text;       // idents uppercased, syms verbatim
  long long int_val = 0;  // number, those (the atom index)
  double real_val = 0.0;
  bool tilde = false;  // those: ~k instead of @k
  int line = 0;
};

// transcript events raised while scanning (includes, substitutions, errors)
struct LexEvent {
  int line = 0;
  int phase = 0;  // 0 scan, 1 semantic, 2 section-ok; merged sort key
  std::string text;
};

// resolves an INCLUDE name to file content; nullopt if unreadable
using FileLoader = std::function<std::optional<std::string>(const std::string&)>;

struct LexResult {
  std::vector<Token> tokens;  // ends with eof
  std::vector<LexEvent> events;
  int errors = 0;
  int source_lines = 0;
  std::map<std::string, long long> defines;
};

// Line-oriented scan. '#' comments; ';' acts as a newline; newlines inside
// [ ] or ( ) are suppressed; {NAME} expands from #define associations loaded
// by INCLUDE lines as they are reached. verbose records one substitution
// event per distinct textual form.
LexResult lex(const std::string& source, const FileLoader& loader, bool verbose);

}  // namespace ariel
