#include "ariel/parser.h"

#include <cctype>

namespace ariel {

namespace {

// timeout keyword spellings, canonicalised to the runtime's deadline names
const std::pair<const char*, const char*> timeout_names[] = {
    {"MIA_SEND_TIMEOUT", "mia_send"},
    {"TAIA_RECV_TIMEOUT", "taia_recv"},
    {"MIA_RECV_TIMEOUT", "mia_recv"},
    {"TAIA_SEND_TIMEOUT", "taia_send"},
    {"TEIF_TIMEOUT", "teif"},
    {"I'M_ALIVE_CLEAR_TIMEOUT", "ia_clear"},
    {"I'M_ALIVE_SET_TIMEOUT", "ia_set"},
    {"MIA_TIMEOUT", "mia_send"},
    {"TAIA_TIMEOUT", "taia_recv"},
    {"MIA_TIMEOUT_B", "mia_recv"},
    {"TAIA_TIMEOUT_B", "taia_send"},
    {"ALIVE_TIMEOUT", "ia_clear"},
    {"ALIVE_TIMEOUT_B", "ia_set"},
    {"REQUEST_DB_TIMEOUT", "request_db"},
    {"REPLY_DB_TIMEOUT", "reply_db"},
    {"MID_TIMEOUT", "mid"},
};

const char* timeout_key(const std::string& ident) {
  for (const auto& [kw, key] : timeout_names)
    if (ident == kw) return key;
  return nullptr;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

struct Parser {
  const std::vector<Token>& toks;
  size_t pos = 0;
  ParseResult out;

  explicit Parser(const std::vector<Token>& t) : toks(t) {}

  const Token& cur() const { return toks[pos]; }
  const Token& peek(size_t ahead = 1) const {
    size_t i = pos + ahead;
    return i < toks.size() ? toks[i] : toks.back();
  }
  void advance() {
    if (cur().type != Token::Type::eof) ++pos;
  }

  bool is_ident(const char* text) const {
    return cur().type == Token::Type::ident && cur().text == text;
  }
  bool is_sym(char c) const { return cur().type == Token::Type::sym && cur().text[0] == c; }
  bool is_newline() const { return cur().type == Token::Type::newline; }
  bool at_eof() const { return cur().type == Token::Type::eof; }

  void error(const std::string& msg) {
    out.events.push_back({cur().line, 0, "\tLine " + std::to_string(cur().line) + ": " + msg});
    ++out.errors;
  }

  void sync_to_newline() {
    while (!at_eof() && !is_newline()) advance();
  }

  // statement separators; a trailing '.' before the break is tolerated
  void skip_seps() {
    while (is_newline() || is_sym('.')) advance();
  }
  bool expect_sep() {
    if (is_sym('.')) advance();
    if (is_newline() || at_eof()) {
      skip_seps();
      return true;
    }
    error("syntax error: unexpected '" + cur().text + "'");
    sync_to_newline();
    skip_seps();
    return false;
  }

  bool expect_sym(char c) {
    if (is_sym(c)) {
      advance();
      return true;
    }
    error(std::string("syntax error: expected '") + c + "'");
    return false;
  }
  bool expect_kw(const char* kw) {
    if (is_ident(kw)) {
      advance();
      return true;
    }
    error(std::string("syntax error: expected ") + kw);
    return false;
  }
  bool expect_number(long long& v) {
    if (cur().type == Token::Type::number) {
      v = cur().int_val;
      advance();
      return true;
    }
    error("syntax error: expected a number");
    return false;
  }
  bool expect_real(double& v) {
    if (cur().type == Token::Type::real) {
      v = cur().real_val;
      advance();
      return true;
    }
    if (cur().type == Token::Type::number) {
      v = static_cast<double>(cur().int_val);
      advance();
      return true;
    }
    error("syntax error: expected a real");
    return false;
  }

  // time units scale to ticks of one microsecond
  long long unit_scale() {
    if (cur().type != Token::Type::ident) return 1;
    const std::string& u = cur().text;
    long long scale = 0;
    if (u == "MS" || u == "MILLISEC" || u == "MILLISECS" || u == "MILLISECONDS") scale = 1000;
    else if (u == "US" || u == "MICROSEC" || u == "MICROSECS" || u == "MICROSECONDS") scale = 1;
    else if (u == "S" || u == "SEC" || u == "SECS" || u == "SECONDS") scale = 1000000;
    if (scale) advance();
    return scale ? scale : 1;
  }

  // entity heads: T0 / TASK10 fused, or TASK 0 / NODE 1 / LOGICAL 5, or T* wildcards
  bool entity_head(core::Kind& kind, std::string& digits, bool& fused) {
    if (cur().type != Token::Type::ident) return false;
    const std::string& t = cur().text;
    auto split = [&](const char* prefix, core::Kind k) {
      size_t len = std::string(prefix).size();
      if (t.size() > len && t.compare(0, len, prefix) == 0 && all_digits(t.substr(len))) {
        kind = k;
        digits = t.substr(len);
        fused = true;
        return true;
      }
      return false;
    };
    if (split("TASK", core::Kind::task) || split("NODE", core::Kind::node) ||
        split("LOGICAL", core::Kind::group) || split("GROUP", core::Kind::group))
      return true;
    if (split("T", core::Kind::task) || split("N", core::Kind::node) ||
        split("G", core::Kind::group) || split("L", core::Kind::group))
      return true;
    if (t == "TASK" || t == "T") {
      kind = core::Kind::task;
      fused = false;
      return true;
    }
    if (t == "NODE" || t == "N") {
      kind = core::Kind::node;
      fused = false;
      return true;
    }
    if (t == "LOGICAL" || t == "GROUP" || t == "G") {
      kind = core::Kind::group;
      fused = false;
      return true;
    }
    return false;
  }

  bool parse_entity(Target& tgt, bool allow_those) {
    tgt.line = cur().line;
    if (cur().type == Token::Type::those) {
      if (!allow_those) {
        error("syntax error: @/~ not allowed here");
        return false;
      }
      tgt.mode = cur().tilde ? TargetMode::tilde : TargetMode::at;
      tgt.id = static_cast<int>(cur().int_val);
      advance();
      return true;
    }
    core::Kind kind;
    std::string digits;
    bool fused = false;
    if (!entity_head(kind, digits, fused)) {
      error("syntax error: expected an entity");
      return false;
    }
    tgt.kind = kind;
    if (fused) {
      tgt.mode = TargetMode::literal;
      tgt.id = std::stoi(digits);
      advance();
      return true;
    }
    advance();
    if (is_sym('*')) {
      tgt.mode = TargetMode::star;
      tgt.id = -1;
      advance();
      return true;
    }
    long long id;
    if (!expect_number(id)) return false;
    tgt.mode = TargetMode::literal;
    tgt.id = static_cast<int>(id);
    return true;
  }

  bool parse_number_list(std::vector<long long>& vals) {
    long long v;
    if (!expect_number(v)) return false;
    vals.push_back(v);
    while (is_sym(',')) {
      advance();
      if (!expect_number(v)) return false;
      vals.push_back(v);
    }
    return true;
  }

  // [a,b] or a; fills lo..hi inclusive
  bool parse_id_or_interval(int& lo, int& hi) {
    long long a, b;
    if (is_sym('[')) {
      advance();
      if (!expect_number(a) || !expect_sym(',') || !expect_number(b) || !expect_sym(']'))
        return false;
      lo = static_cast<int>(a);
      hi = static_cast<int>(b);
      return true;
    }
    if (!expect_number(a)) return false;
    lo = hi = static_cast<int>(a);
    return true;
  }

  // expressions: OR < AND < NOT; '|' and '&' are accepted spellings
  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr l = parse_and();
    while (l && (is_ident("OR") || is_sym('|'))) {
      int line = cur().line;
      advance();
      ExprPtr r = parse_and();
      if (!r) return nullptr;
      auto e = std::make_unique<Expr>();
      e->line = line;
      e->node = BinExpr{false, std::move(l), std::move(r)};
      l = std::move(e);
    }
    return l;
  }

  ExprPtr parse_and() {
    ExprPtr l = parse_unary();
    while (l && (is_ident("AND") || is_sym('&'))) {
      int line = cur().line;
      advance();
      ExprPtr r = parse_unary();
      if (!r) return nullptr;
      auto e = std::make_unique<Expr>();
      e->line = line;
      e->node = BinExpr{true, std::move(l), std::move(r)};
      l = std::move(e);
    }
    return l;
  }

  std::optional<core::Status> status_kw() {
    if (cur().type != Token::Type::ident) return std::nullopt;
    const std::string& t = cur().text;
    if (t == "FAULTY") return core::Status::faulty;
    if (t == "RUNNING") return core::Status::running;
    if (t == "REBOOTED") return core::Status::rebooted;
    if (t == "STARTED") return core::Status::started;
    if (t == "ISOLATED") return core::Status::isolated;
    if (t == "RESTARTED") return core::Status::restarted;
    if (t == "TRANSIENT") return core::Status::transient;
    if (t == "REINTEGRATED") return core::Status::reintegrated;
    return std::nullopt;
  }

  std::optional<int> compare_op() {
    if (cur().type != Token::Type::sym) return std::nullopt;
    char a = cur().text[0];
    char b = peek().type == Token::Type::sym ? peek().text[0] : '\0';
    if (a == '=' && b == '=') { advance(); advance(); return 0; }
    if (a == '!' && b == '=') { advance(); advance(); return 1; }
    if (a == '>' && b == '=') { advance(); advance(); return 3; }
    if (a == '<' && b == '=') { advance(); advance(); return 5; }
    if (a == '>') { advance(); return 2; }
    if (a == '<') { advance(); return 4; }
    if (a == '=') { advance(); return 0; }
    return std::nullopt;
  }

  ExprPtr parse_unary() {
    int line = cur().line;
    if (is_ident("NOT")) {
      advance();
      ExprPtr inner = parse_unary();
      if (!inner) return nullptr;
      auto e = std::make_unique<Expr>();
      e->line = line;
      e->node = NotExpr{std::move(inner)};
      return e;
    }
    if (is_sym('(')) {
      advance();
      ExprPtr inner = parse_expr();
      if (!inner) return nullptr;
      if (!expect_sym(')')) return nullptr;
      return inner;
    }
    if (auto st = status_kw()) {
      advance();
      Target tgt;
      if (!parse_entity(tgt, true)) return nullptr;
      auto e = std::make_unique<Expr>();
      e->line = line;
      e->node = StatusAtom{*st, tgt};
      return e;
    }
    if (is_ident("ERRN") || is_ident("ERRT") || is_ident("PHASE")) {
      core::ValueAtom which = is_ident("ERRN")   ? core::ValueAtom::errn
                              : is_ident("ERRT") ? core::ValueAtom::errt
                                                 : core::ValueAtom::phase;
      advance();
      if (!expect_sym('(')) return nullptr;
      Target tgt;
      if (!parse_entity(tgt, false)) return nullptr;
      if (!expect_sym(')')) return nullptr;
      auto op = compare_op();
      if (!op) {
        error("syntax error: expected a comparison operator");
        return nullptr;
      }
      long long lit;
      if (!expect_number(lit)) return nullptr;
      auto e = std::make_unique<Expr>();
      e->line = line;
      e->node = ValueAtom{which, tgt, *op, lit};
      return e;
    }
    if (is_ident("DEADLOCKED")) {
      advance();
      Target a, b;
      if (!parse_entity(a, false) || !parse_entity(b, false)) return nullptr;
      auto e = std::make_unique<Expr>();
      e->line = line;
      e->node = DeadlockAtom{a, b};
      return e;
    }
    error("syntax error: expected a condition");
    return nullptr;
  }

  bool parse_warn_clause(WarnClause& w) {
    if (!parse_entity(w.target, true)) return false;
    if (is_sym('(')) {
      advance();
      if (!parse_number_list(w.args)) return false;
      if (!expect_sym(')')) return false;
    }
    return true;
  }

  bool parse_action(Action& act) {
    act.line = cur().line;
    if (is_ident("IF")) {
      auto sec = parse_section();
      if (!sec) return false;
      act.node = std::move(sec);
      return true;
    }
    auto simple = [&](SimpleVerb verb) {
      advance();
      Target tgt;
      if (!parse_entity(tgt, true)) return false;
      act.node = SimpleAction{verb, tgt};
      return true;
    };
    bool ok;
    if (is_ident("STOP")) ok = simple(SimpleVerb::stop);
    else if (is_ident("START")) ok = simple(SimpleVerb::start);
    else if (is_ident("RESTART")) ok = simple(SimpleVerb::restart);
    else if (is_ident("ENABLE")) ok = simple(SimpleVerb::enable);
    else if (is_ident("ISOLATE")) ok = simple(SimpleVerb::isolate);
    else if (is_ident("REBOOT")) ok = simple(SimpleVerb::reboot);
    else if (is_ident("ERR")) {
      advance();
      ErrWarnAction ew;
      if (!expect_number(ew.errn)) return false;
      if (!parse_entity(ew.subject, false)) return false;
      if (!expect_kw("WARN")) return false;
      WarnClause w;
      if (!parse_warn_clause(w)) return false;
      ew.warns.push_back(std::move(w));
      act.node = std::move(ew);
      ok = true;
    } else if (is_ident("REMOVE")) {
      advance();
      RemoveAction rm;
      if (is_ident("PHASE")) rm.sel = core::RemoveSel::phase;
      else if (is_ident("ANY")) rm.sel = core::RemoveSel::any;
      else {
        error("syntax error: expected PHASE or ANY");
        return false;
      }
      advance();
      if (!parse_entity(rm.target, false)) return false;
      if (!expect_kw("FROM") || !expect_kw("ERRORLIST")) return false;
      act.node = rm;
      ok = true;
    } else if (is_ident("SEND")) {
      advance();
      SendAction s;
      if (is_ident("FAULTY")) {
        s.faulty = true;
        advance();
      } else if (!expect_number(s.value)) {
        return false;
      }
      if (!parse_entity(s.task, false)) return false;
      act.node = s;
      ok = true;
    } else if (is_ident("CALL")) {
      advance();
      CallAction c;
      if (!expect_number(c.routine)) return false;
      if (is_sym('(')) {
        advance();
        if (!parse_number_list(c.args)) return false;
        if (!expect_sym(')')) return false;
      }
      act.node = std::move(c);
      ok = true;
    } else if (is_ident("PAUSE")) {
      advance();
      PauseAction p;
      if (!expect_number(p.ticks)) return false;
      act.node = p;
      ok = true;
    } else {
      error("syntax error: unknown action '" + cur().text + "'");
      return false;
    }
    if (!ok) return false;
    // any action may chain AND WARN target (args)
    while (is_ident("AND") && peek().type == Token::Type::ident && peek().text == "WARN") {
      advance();
      advance();
      WarnClause w;
      if (!parse_warn_clause(w)) return false;
      if (auto* ew = std::get_if<ErrWarnAction>(&act.node)) ew->warns.push_back(std::move(w));
      else act.extra_warns.push_back(std::move(w));
    }
    return true;
  }

  // action lines until ELIF/ELSE/FI
  bool parse_actions(std::vector<Action>& actions) {
    for (;;) {
      skip_seps();
      if (at_eof()) {
        error("syntax error: unterminated section");
        return false;
      }
      if (is_ident("ELIF") || is_ident("ELSE") || is_ident("FI")) return true;
      Action act;
      if (!parse_action(act)) {
        sync_to_newline();
        continue;
      }
      actions.push_back(std::move(act));
      if (!is_ident("ELIF") && !is_ident("ELSE") && !is_ident("FI")) expect_sep();
    }
  }

  std::unique_ptr<Section> parse_section() {
    auto sec = std::make_unique<Section>();
    sec->line = cur().line;
    advance();  // IF
    for (;;) {
      Branch br;
      if (!expect_sym('[')) return nullptr;
      br.guard = parse_expr();
      if (!br.guard) {
        sync_to_newline();
        return nullptr;
      }
      if (!expect_sym(']')) return nullptr;
      skip_seps();
      if (!expect_kw("THEN")) return nullptr;
      if (!parse_actions(br.actions)) return nullptr;
      sec->branches.push_back(std::move(br));
      if (is_ident("ELIF")) {
        advance();
        continue;
      }
      break;
    }
    if (is_ident("ELSE")) {
      advance();
      sec->has_else = true;
      if (!parse_actions(sec->else_actions)) return nullptr;
    }
    if (!is_ident("FI")) {
      error("syntax error: expected FI");
      return nullptr;
    }
    sec->end_line = cur().line;
    advance();
    out.events.push_back({sec->end_line, 2, "if-then-else: ok"});
    return sec;
  }

  // configuration statements

  void parse_define(Script& script) {
    Stmt stmt;
    stmt.line = cur().line;
    advance();  // DEFINE
    DefineStmt d;
    long long a;
    if (!expect_number(a)) { sync_to_newline(); return; }
    if (is_sym('-')) {
      advance();
      long long b;
      if (!expect_number(b)) { sync_to_newline(); return; }
      for (long long n = a; n <= b; ++n) d.nodes.push_back(static_cast<int>(n));
    } else {
      d.nodes.push_back(static_cast<int>(a));
      while (is_sym(',')) {
        advance();
        long long n;
        if (!expect_number(n)) { sync_to_newline(); return; }
        d.nodes.push_back(static_cast<int>(n));
      }
    }
    if (!expect_sym('=')) { sync_to_newline(); return; }
    if (is_ident("MANAGER")) d.role = 0;
    else if (is_ident("ASSISTANT") || is_ident("ASSISTANTS")) d.role = 1;
    else {
      error("syntax error: expected a role");
      sync_to_newline();
      return;
    }
    advance();
    stmt.node = std::move(d);
    script.stmts.push_back(std::move(stmt));
    expect_sep();
  }

  void parse_task_stmt(Script& script) {
    Stmt stmt;
    stmt.line = cur().line;
    advance();  // TASK
    int lo, hi;
    if (!parse_id_or_interval(lo, hi)) { sync_to_newline(); return; }
    std::string name;
    if (is_sym('=')) {
      advance();
      if (cur().type != Token::Type::string) {
        error("syntax error: expected a name string");
        sync_to_newline();
        return;
      }
      name = cur().text;
      advance();
    }
    if (!expect_kw("IS")) { sync_to_newline(); return; }
    if (is_ident("MBOX")) {
      advance();
      AliasStmt al;
      al.task_lo = lo;
      al.task_hi = hi;
      int mlo, mhi;
      if (!parse_id_or_interval(mlo, mhi)) { sync_to_newline(); return; }
      al.mbox_lo = mlo;
      if (!expect_sym(',') || !expect_kw("ALIAS")) { sync_to_newline(); return; }
      int alo, ahi;
      if (!parse_id_or_interval(alo, ahi)) { sync_to_newline(); return; }
      al.alias_lo = alo;
      stmt.node = al;
      script.stmts.push_back(std::move(stmt));
      expect_sep();
      return;
    }
    if (!expect_kw("NODE")) { sync_to_newline(); return; }
    TaskDeclStmt td;
    td.id_lo = lo;
    td.id_hi = hi;
    td.name = std::move(name);
    long long node;
    if (!expect_number(node)) { sync_to_newline(); return; }
    td.node = static_cast<int>(node);
    if (!expect_sym(',') || !expect_kw("TASKID")) { sync_to_newline(); return; }
    int tlo, thi;
    if (!parse_id_or_interval(tlo, thi)) { sync_to_newline(); return; }
    td.taskid_lo = tlo;
    stmt.node = std::move(td);
    script.stmts.push_back(std::move(stmt));
    expect_sep();
  }

  // optional unit after a duration; values are stored in ticks of one microsecond
  void apply_time_unit(long long& v) {
    if (cur().type != Token::Type::ident) return;
    const std::string& u = cur().text;
    if (u == "MS" || u.rfind("MILLISEC", 0) == 0) v *= 1000;
    else if (u == "US" || u.rfind("MICROSEC", 0) == 0) /* already ticks */;
    else if (u == "S" || u.rfind("SEC", 0) == 0) v *= 1000000;
    else return;
    advance();
  }

  // END, optionally followed by a matching closer word
  bool parse_end(std::initializer_list<const char*> closers) {
    if (!expect_kw("END")) return false;
    if (cur().type == Token::Type::ident) {
      for (const char* c : closers) {
        if (cur().text == c) {
          advance();
          break;
        }
      }
    }
    return true;
  }

  void parse_logical(Script& script) {
    Stmt stmt;
    stmt.line = cur().line;
    advance();  // LOGICAL
    LogicalStmt lg;
    long long id;
    if (!expect_number(id)) { sync_to_newline(); return; }
    lg.id = static_cast<int>(id);
    if (is_sym('=')) {
      advance();
      if (cur().type != Token::Type::string) {
        error("syntax error: expected a name string");
        sync_to_newline();
        return;
      }
      lg.name = cur().text;
      advance();
    }
    if (!expect_kw("IS")) { sync_to_newline(); return; }
    for (;;) {
      if (is_ident("TASK")) advance();
      long long member;
      if (!expect_number(member)) { sync_to_newline(); return; }
      lg.members.push_back(static_cast<int>(member));
      if (is_sym(',')) {
        advance();
        continue;
      }
      break;
    }
    if (!parse_end({"LOGICAL"})) { sync_to_newline(); return; }
    stmt.node = std::move(lg);
    script.stmts.push_back(std::move(stmt));
    expect_sep();
  }

  bool parse_alpha_params(double& threshold, double& factor) {
    if (!expect_kw("THRESHOLD") || !expect_sym('=') || !expect_real(threshold)) return false;
    if (!expect_sym(',')) return false;
    if (!expect_kw("FACTOR") || !expect_sym('=') || !expect_real(factor)) return false;
    return parse_end({"ALPHA-COUNT", "ALPHACOUNT", "ALPHA"});
  }

  void parse_alphacount(Script& script) {
    Stmt stmt;
    stmt.line = cur().line;
    advance();  // ALPHACOUNT / ALPHA-COUNT
    AlphaStmt a;
    long long id;
    if (!expect_number(id)) { sync_to_newline(); return; }
    a.id = static_cast<int>(id);
    if (!expect_kw("IS")) { sync_to_newline(); return; }
    if (!parse_alpha_params(a.threshold, a.factor)) { sync_to_newline(); return; }
    stmt.node = a;
    script.stmts.push_back(std::move(stmt));
    expect_sep();
  }

  void parse_watchdog(Script& script) {
    Stmt stmt;
    stmt.line = cur().line;
    advance();  // WATCHDOG
    WatchdogStmt w;
    if (is_ident("TASK")) advance();
    long long id;
    if (!expect_number(id)) { sync_to_newline(); return; }
    w.task = static_cast<int>(id);
    if (is_ident("WATCHES")) {
      advance();
      if (is_ident("TASK")) advance();
      long long watched;
      if (!expect_number(watched)) { sync_to_newline(); return; }
      w.watches = static_cast<int>(watched);
    }
    expect_sep();
    for (;;) {
      skip_seps();
      if (at_eof()) {
        error("syntax error: unterminated WATCHDOG");
        return;
      }
      if (is_ident("END")) {
        parse_end({"WATCHDOG"});
        break;
      }
      if (is_ident("HEARTBEATS")) {
        advance();
        if (!expect_kw("EVERY")) { sync_to_newline(); continue; }
        long long n;
        if (!expect_number(n)) { sync_to_newline(); continue; }
        w.period_ticks = n * unit_scale();
        expect_sep();
        continue;
      }
      if (is_ident("ON")) {
        advance();
        if (!expect_kw("ERROR")) { sync_to_newline(); continue; }
        if (is_ident("WARN")) {
          advance();
          if (is_ident("BACKBONE")) {
            advance();
            w.on_error = WatchdogStmt::OnError::warn_backbone;
          } else {
            if (is_ident("TASK")) advance();
            long long t;
            if (!expect_number(t)) { sync_to_newline(); continue; }
            w.on_error = WatchdogStmt::OnError::warn_task;
            w.warn_task = static_cast<int>(t);
          }
        } else if (is_ident("REBOOT")) {
          advance();
          w.on_error = WatchdogStmt::OnError::reboot;
        } else if (is_ident("RESTART")) {
          advance();
          w.on_error = WatchdogStmt::OnError::restart;
        } else {
          error("syntax error: expected WARN, REBOOT or RESTART");
          sync_to_newline();
          continue;
        }
        expect_sep();
        continue;
      }
      if (is_ident("ALPHACOUNT") || is_ident("ALPHA-COUNT")) {
        advance();
        if (!expect_kw("IS")) { sync_to_newline(); continue; }
        double th, fa;
        if (!parse_alpha_params(th, fa)) { sync_to_newline(); continue; }
        w.alpha = {th, fa};
        expect_sep();
        continue;
      }
      error("syntax error: unknown WATCHDOG clause '" + cur().text + "'");
      sync_to_newline();
    }
    stmt.node = w;
    script.stmts.push_back(std::move(stmt));
    expect_sep();
  }

  void parse_nversion(Script& script) {
    Stmt stmt;
    stmt.line = cur().line;
    advance();  // N-VERSION
    NVersionStmt nv;
    if (!expect_kw("TASK")) { sync_to_newline(); return; }
    long long id;
    if (!expect_number(id)) { sync_to_newline(); return; }
    nv.task = static_cast<int>(id);
    expect_sep();
    for (;;) {
      skip_seps();
      if (at_eof()) {
        error("syntax error: unterminated N-VERSION");
        return;
      }
      if (is_ident("END")) {
        parse_end({"N-VERSION", "NVERSION"});
        break;
      }
      if (is_ident("VERSION")) {
        advance();
        VersionDecl v;
        long long rank;
        if (!expect_number(rank)) { sync_to_newline(); continue; }
        v.rank = static_cast<int>(rank);
        if (!expect_kw("IS")) { sync_to_newline(); continue; }
        if (is_ident("SPARE")) {
          v.spare = true;
          advance();
        }
        if (!expect_kw("TASK")) { sync_to_newline(); continue; }
        long long task;
        if (!expect_number(task)) { sync_to_newline(); continue; }
        v.task = static_cast<int>(task);
        if (is_ident("TIMEOUT")) {
          advance();
          long long n;
          if (!expect_number(n)) { sync_to_newline(); continue; }
          v.timeout_ticks = n * unit_scale();
        }
        nv.versions.push_back(v);
        expect_sep();
        continue;
      }
      if (is_ident("VOTING")) {
        advance();
        if (!expect_kw("ALGORITHM") || !expect_kw("IS")) { sync_to_newline(); continue; }
        if (cur().type != Token::Type::ident) {
          error("syntax error: expected an algorithm name");
          sync_to_newline();
          continue;
        }
        std::string alg = cur().text;
        for (char& c : alg) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        nv.algorithm = alg;
        advance();
        expect_sep();
        continue;
      }
      if (is_ident("METRIC")) {
        advance();
        if (cur().type != Token::Type::string) {
          error("syntax error: expected a metric string");
          sync_to_newline();
          continue;
        }
        nv.metric = cur().text;
        advance();
        expect_sep();
        continue;
      }
      if (is_ident("ON")) {
        advance();
        bool on_error;
        if (is_ident("ERROR")) on_error = true;
        else if (is_ident("SUCCESS")) on_error = false;
        else {
          error("syntax error: expected ERROR or SUCCESS");
          sync_to_newline();
          continue;
        }
        advance();
        if (!expect_kw("TASK")) { sync_to_newline(); continue; }
        long long t;
        if (!expect_number(t)) { sync_to_newline(); continue; }
        (on_error ? nv.on_error_task : nv.on_success_task) = static_cast<int>(t);
        expect_sep();
        continue;
      }
      error("syntax error: unknown N-VERSION clause '" + cur().text + "'");
      sync_to_newline();
    }
    stmt.node = std::move(nv);
    script.stmts.push_back(std::move(stmt));
    expect_sep();
  }

  void parse_inject(Script& script) {
    Stmt stmt;
    stmt.line = cur().line;
    advance();  // INJECT
    InjectStmt in;
    if (is_ident("BFAULT")) in.mfault = false;
    else if (is_ident("MFAULT")) in.mfault = true;
    else {
      error("syntax error: expected BFAULT or MFAULT");
      sync_to_newline();
      return;
    }
    advance();
    if (!expect_kw("ON")) { sync_to_newline(); return; }
    if (is_ident("NODE")) in.on_node = true;
    else if (is_ident("COMPONENT")) in.on_node = false;
    else {
      error("syntax error: expected NODE or COMPONENT");
      sync_to_newline();
      return;
    }
    advance();
    long long id, after;
    if (!expect_number(id)) { sync_to_newline(); return; }
    in.id = static_cast<int>(id);
    if (!expect_kw("AFTER")) { sync_to_newline(); return; }
    if (!expect_number(after)) { sync_to_newline(); return; }
    in.after_ticks = after;
    if (is_ident("TICKS")) advance();
    stmt.node = in;
    script.stmts.push_back(std::move(stmt));
    expect_sep();
  }

  void parse_stmt(Script& script) {
    if (is_ident("INCLUDE")) {
      Stmt stmt;
      stmt.line = cur().line;
      advance();
      if (cur().type == Token::Type::string) {
        stmt.node = IncludeStmt{cur().text};
        advance();
        script.stmts.push_back(std::move(stmt));
      }
      expect_sep();
      return;
    }
    if (is_ident("NPROCS")) {
      Stmt stmt;
      stmt.line = cur().line;
      advance();
      long long n;
      if (!expect_sym('=') || !expect_number(n)) { sync_to_newline(); return; }
      stmt.node = NprocsStmt{static_cast<int>(n)};
      script.stmts.push_back(std::move(stmt));
      expect_sep();
      return;
    }
    if (is_ident("NUMTASKS")) {
      Stmt stmt;
      stmt.line = cur().line;
      advance();
      long long node, count;
      if (!expect_number(node) || !expect_sym('=') || !expect_number(count)) {
        sync_to_newline();
        return;
      }
      stmt.node = NumTasksStmt{static_cast<int>(node), static_cast<int>(count)};
      script.stmts.push_back(std::move(stmt));
      expect_sep();
      return;
    }
    if (is_ident("DEFINE") || is_ident("DEF")) { parse_define(script); return; }
    if (is_ident("TASK")) { parse_task_stmt(script); return; }
    if (is_ident("LOGICAL")) { parse_logical(script); return; }
    if (is_ident("ALPHACOUNT") || is_ident("ALPHA-COUNT")) { parse_alphacount(script); return; }
    if (is_ident("WATCHDOG")) { parse_watchdog(script); return; }
    if (is_ident("N-VERSION") || is_ident("NVERSION")) { parse_nversion(script); return; }
    if (is_ident("INJECT")) { parse_inject(script); return; }
    if (is_ident("IF")) {
      Stmt stmt;
      stmt.line = cur().line;
      auto sec = parse_section();
      if (!sec) {
        sync_to_newline();
        return;
      }
      stmt.node = std::move(sec);
      script.stmts.push_back(std::move(stmt));
      expect_sep();
      return;
    }
    if (cur().type == Token::Type::ident) {
      if (const char* key = timeout_key(cur().text)) {
        Stmt stmt;
        stmt.line = cur().line;
        advance();
        long long v;
        if (!expect_sym('=') || !expect_number(v)) { sync_to_newline(); return; }
        apply_time_unit(v);
        stmt.node = TimeoutStmt{key, v};
        script.stmts.push_back(std::move(stmt));
        expect_sep();
        return;
      }
      // unlisted *_TIMEOUT names are kept under their lowercased spelling
      if (cur().text.size() > 8 && cur().text.rfind("_TIMEOUT") == cur().text.size() - 8) {
        Stmt stmt;
        stmt.line = cur().line;
        std::string name = cur().text;
        for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        advance();
        long long v;
        if (!expect_sym('=') || !expect_number(v)) { sync_to_newline(); return; }
        apply_time_unit(v);
        stmt.node = TimeoutStmt{name, v};
        script.stmts.push_back(std::move(stmt));
        expect_sep();
        return;
      }
    }
    error("syntax error: unexpected '" + cur().text + "'");
    sync_to_newline();
  }

  void run(const std::string& filename) {
    out.script.filename = filename;
    for (;;) {
      skip_seps();
      if (at_eof()) break;
      parse_stmt(out.script);
    }
  }
};

}  // namespace

ParseResult parse(const std::vector<Token>& tokens, const std::string& filename) {
  Parser p(tokens);
  p.run(filename);
  return std::move(p.out);
}

}  // namespace ariel
