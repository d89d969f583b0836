#include "ariel/lexer.h"

#include <cctype>
#include <set>
#include <sstream>

namespace ariel {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

struct Scanner {
  const FileLoader& loader;
  bool verbose;
  LexResult out;
  std::set<std::string> seen_forms;
  int bracket_depth = 0;

  explicit Scanner(const FileLoader& l, bool v) : loader(l), verbose(v) {}

  void event(int line, const std::string& text) { out.events.push_back({line, 0, text}); }

  void error(int line, const std::string& text) {
    out.events.push_back({line, 0, "\tLine " + std::to_string(line) + ": " + text});
    ++out.errors;
  }

  // INCLUDE lines load '#define NAME value' associations before later lines scan
  void handle_include(const std::string& line, int line_no) {
    size_t q1 = line.find('"');
    size_t q2 = q1 == std::string::npos ? std::string::npos : line.find('"', q1 + 1);
    if (q2 == std::string::npos) {
      error(line_no, "syntax error: malformed INCLUDE");
      return;
    }
    std::string file = line.substr(q1 + 1, q2 - q1 - 1);
    std::optional<std::string> content = loader ? loader(file) : std::nullopt;
    if (!content) {
      error(line_no, "cannot open include file '" + file + "'");
      return;
    }
    int stored = 0;
    std::istringstream in(*content);
    std::string hline;
    while (std::getline(in, hline)) {
      size_t at = hline.find_first_not_of(" \t");
      if (at == std::string::npos || hline[at] != '#') continue;
      std::istringstream hs(hline.substr(at + 1));
      std::string kw, name;
      long long value;
      if (hs >> kw >> name >> value && upper(kw) == "DEFINE") {
        out.defines[name] = value;
        ++stored;
      }
    }
    event(line_no, "[ Including file '" + file + "' ..." + std::to_string(stored) +
                       " associations stored. ]");
  }

  // replaces each {NAME}, remembering "prefix{NAME}" as the reported form
  std::string substitute(const std::string& line, int line_no) {
    std::string result;
    size_t i = 0;
    while (i < line.size()) {
      if (line[i] != '{') {
        result += line[i++];
        continue;
      }
      size_t close = line.find('}', i);
      if (close == std::string::npos) {
        error(line_no, "syntax error: unterminated {");
        result += line.substr(i);
        break;
      }
      std::string name = line.substr(i + 1, close - i - 1);
      auto it = out.defines.find(name);
      if (it == out.defines.end()) {
        error(line_no, "semantical error: Undefined symbol {" + name + "}");
        i = close + 1;
        continue;
      }
      std::string value = std::to_string(it->second);
      size_t p = result.size();
      while (p > 0 && ident_char(result[p - 1])) --p;
      std::string prefix = result.substr(p);
      std::string form = prefix + "{" + name + "}";
      if (verbose && seen_forms.insert(form).second)
        event(line_no, "substituting " + form + " with " + prefix + value);
      result += value;
      i = close + 1;
    }
    return result;
  }

  void push(Token t, int line_no) {
    t.line = line_no;
    out.tokens.push_back(std::move(t));
  }

  void scan_line(const std::string& text, int line_no) {
    size_t i = 0;
    size_t n = text.size();
    while (i < n) {
      char c = text[i];
      if (c == '#') break;
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t j = i;
        while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j < n && text[j] == '.' && j + 1 < n &&
            std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
          size_t k = j + 1;
          while (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          Token t;
          t.type = Token::Type::real;
          t.text = text.substr(i, k - i);
          t.real_val = std::stod(t.text);
          push(std::move(t), line_no);
          i = k;
        } else {
          Token t;
          t.type = Token::Type::number;
          t.text = text.substr(i, j - i);
          t.int_val = std::stoll(t.text);
          push(std::move(t), line_no);
          i = j;
        }
        continue;
      }
      if (ident_start(c)) {
        size_t j = i;
        while (j < n) {
          if (ident_char(text[j])) {
            ++j;
          } else if (text[j] == '-' && j + 1 < n &&
                     std::isalpha(static_cast<unsigned char>(text[j + 1]))) {
            // keeps N-VERSION and ALPHA-COUNT whole without eating 1-3 intervals
            j += 2;
          } else {
            break;
          }
        }
        Token t;
        t.type = Token::Type::ident;
        t.text = upper(text.substr(i, j - i));
        push(std::move(t), line_no);
        i = j;
        continue;
      }
      if (c == '"') {
        size_t close = text.find('"', i + 1);
        if (close == std::string::npos) {
          error(line_no, "syntax error: unterminated string");
          i = n;
          continue;
        }
        Token t;
        t.type = Token::Type::string;
        t.text = text.substr(i + 1, close - i - 1);
        push(std::move(t), line_no);
        i = close + 1;
        continue;
      }
      if (c == '@' || c == '~') {
        size_t j = i + 1;
        size_t k = j;
        while (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
        if (k == j) {
          error(line_no, std::string("syntax error: ") + c + " needs an atom number");
          ++i;
          continue;
        }
        Token t;
        t.type = Token::Type::those;
        t.tilde = c == '~';
        t.int_val = std::stoll(text.substr(j, k - j));
        t.text = text.substr(i, k - i);
        push(std::move(t), line_no);
        i = k;
        continue;
      }
      if (c == ';') {
        Token t;
        t.type = Token::Type::newline;
        push(std::move(t), line_no);
        ++i;
        continue;
      }
      if (c == '[' || c == '(') ++bracket_depth;
      if ((c == ']' || c == ')') && bracket_depth > 0) --bracket_depth;
      Token t;
      t.type = Token::Type::sym;
      t.text.assign(1, c);
      push(std::move(t), line_no);
      ++i;
    }
    if (bracket_depth == 0) {
      Token t;
      t.type = Token::Type::newline;
      push(std::move(t), line_no);
    }
  }
};

}  // namespace

LexResult lex(const std::string& source, const FileLoader& loader, bool verbose) {
  Scanner sc(loader, verbose);
  std::istringstream in(source);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t at = line.find_first_not_of(" \t");
    if (at != std::string::npos) {
      std::string head = upper(line.substr(at, 7));
      if (head == "INCLUDE") sc.handle_include(line, line_no);
    }
    sc.scan_line(sc.substitute(line, line_no), line_no);
  }
  sc.out.source_lines = line_no;
  Token eof;
  eof.type = Token::Type::eof;
  eof.line = line_no + 1;
  sc.out.tokens.push_back(eof);
  return std::move(sc.out);
}

}  // namespace ariel
