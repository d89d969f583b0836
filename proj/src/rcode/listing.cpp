#include "rcode/listing.h"

#include <cctype>
#include <cstdio>
#include <string>
#include <vector>

#include "core/database.h"

namespace rcode {

const char* op_name(int32_t op) {
  switch (op) {
    case op_stop: return "STOP";
    case op_set_role: return "SET_ROLE";
    case op_if: return "IF";
    case op_fi: return "FI";
    case op_store_phase: return "STORE_PHASE";
    case op_store_status: return "STORE_STATUS";
    case op_store_errn: return "STORE_ERRN";
    case op_store_errt: return "STORE_ERRT";
    case op_compare: return "COMPARE";
    case op_and: return "AND";
    case op_or: return "OR";
    case op_not: return "NOT";
    case op_false: return "FALSE";
    case op_push: return "PUSH";
    case op_send: return "SEND";
    case op_start: return "START";
    case op_restart: return "RESTART";
    case op_isolate: return "ISOLATE";
    case op_enable: return "ENABLE";
    case op_reboot: return "REBOOT";
    case op_warn: return "WARN";
    case op_remove: return "REMOVE";
    case op_call: return "CALL";
    case op_pause: return "PAUSE";
    case op_oanew: return "ANEW_OA_OBJECTS";
    default: return "?";
  }
}

const char* cmp_name(int32_t c) {
  switch (c) {
    case cmp_eq: return "==";
    case cmp_neq: return "!=";
    case cmp_gt: return ">";
    case cmp_ge: return ">=";
    case cmp_lt: return "<";
    case cmp_le: return "<=";
    default: return "?";
  }
}

namespace {

const char* kind_word(core::Kind k) {
  switch (k) {
    case core::Kind::node: return "Node";
    case core::Kind::task: return "Thread";
    case core::Kind::group: return "Group";
  }
  return "?";
}

std::string entity_cell(int32_t enc) {
  EntityOperand e = decode_entity(enc, 0);
  switch (e.mode) {
    case mode_literal: return kind_word(e.kind);
    case mode_at: return "@";
    case mode_tilde: return "~";
    case mode_dollar: return "$";
    case mode_guard_match: return "matched";
    case mode_star: return "*";
    default: return "?";
  }
}

std::string status_word(int32_t code) {
  auto s = static_cast<core::Status>(code);
  std::string w = core::status_name(s);
  if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
  return w;
}

std::string num(int32_t v) { return std::to_string(v); }

}  // namespace

std::string render_listing(const Program& p) {
  std::string out = "line  rcode  opn1  opn2\n";
  char lineno[8];
  for (size_t i = 0; i < p.triplets.size(); ++i) {
    const Triplet& t = p.triplets[i];
    std::snprintf(lineno, sizeof lineno, "%05zu", i);
    std::vector<std::string> cells;
    cells.emplace_back(lineno);
    if (op_name(t.op) == std::string("?")) {
      cells.push_back(num(t.op));
      if (t.opn1 != -1 || t.opn2 != -1) {
        cells.push_back(num(t.opn1));
        cells.push_back(num(t.opn2));
      }
    } else {
      cells.emplace_back(op_name(t.op));
      switch (t.op) {
        case op_stop:
          if (t.opn1 != -1 || t.opn2 != -1) {
            cells.push_back(entity_cell(t.opn1));
            cells.push_back(num(t.opn2));
          }
          break;
        case op_set_role:
          cells.push_back(num(t.opn1));
          cells.push_back(t.opn2 == role_manager ? "Manager" : "Assistant");
          break;
        case op_if:
        case op_fi:
        case op_and:
        case op_or:
        case op_not:
          break;
        case op_store_phase:
        case op_store_errn:
        case op_store_errt:
        case op_send:
        case op_start:
        case op_restart:
        case op_isolate:
        case op_enable:
        case op_reboot:
          cells.push_back(entity_cell(t.opn1));
          cells.push_back(num(t.opn2));
          break;
        case op_store_status:
          cells.push_back(status_word(t.opn1 / 256) + " " + entity_cell(t.opn1 & 0xff));
          cells.push_back(num(t.opn2));
          break;
        case op_compare:
          cells.push_back(cmp_name(t.opn1));
          cells.push_back(num(t.opn2));
          break;
        case op_warn:
          if (t.opn2 == -1) {
            cells.push_back("Backbone");
          } else {
            cells.push_back(entity_cell(t.opn1 & 0xff));
            cells.push_back(num(t.opn2));
          }
          break;
        case op_remove:
          cells.push_back(std::string(t.opn1 / 256 == 0 ? "Phase" : "Any") + " " +
                          entity_cell(t.opn1 & 0xff));
          cells.push_back(num(t.opn2));
          break;
        case op_false:
        case op_push:
        case op_pause:
        case op_oanew:
          cells.push_back(num(t.opn1));
          break;
        case op_call:
          cells.push_back(num(t.opn1));
          cells.push_back(num(t.opn2));
          break;
        default:
          cells.push_back(num(t.opn1));
          cells.push_back(num(t.opn2));
          break;
      }
    }
    std::string line;
    for (size_t c = 0; c < cells.size(); ++c) {
      if (c) line += "  ";
      line += cells[c];
    }
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace rcode
