#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.h"

namespace rcode {

enum Op : int32_t {
  op_stop = 0,  // (-1,-1) halts, entity operands stop a task
  op_set_role = 1,
  op_if = 2,
  op_fi = 3,
  op_store_phase = 4,
  op_store_status = 5,
  op_store_errn = 6,
  op_store_errt = 7,
  op_compare = 8,
  op_and = 9,
  op_or = 10,
  op_not = 11,
  op_false = 12,
  op_push = 13,
  op_send = 14,
  op_start = 15,
  op_restart = 16,
  op_isolate = 17,
  op_enable = 18,
  op_reboot = 19,
  op_warn = 20,
  op_remove = 21,
  op_call = 22,
  op_pause = 23,
  op_oanew = 24,
};

const char* op_name(int32_t op);  // canonical enum-style name, "?" if unknown

enum Cmp : int32_t { cmp_eq = 0, cmp_neq, cmp_gt, cmp_ge, cmp_lt, cmp_le };
const char* cmp_name(int32_t c);

enum Role : int32_t { role_manager = 0, role_assistant = 1 };

// entity operand modes
enum Mode : int32_t {
  mode_literal = 0,
  mode_at = 1,          // @k: entities matched by atom k
  mode_tilde = 2,       // ~k: complement of atom k within its expansion
  mode_dollar = 3,      // $k: the entity atom k was declared on
  mode_guard_match = 4, // union of match sets of satisfied atoms
  mode_star = 5,        // every declared entity of the kind
};

struct EntityOperand {
  core::Kind kind = core::Kind::task;
  int32_t mode = mode_literal;
  int32_t id = 0;  // entity id, or atom index k for @/~/$
};

// operand1 = kind*16 + mode, operand2 = id/k.
// store_status additionally packs the status selector: operand1 += status*256.

// send flag: payload is the first guard-matched id instead of a pushed value
constexpr int32_t send_matched_id_flag = 1 << 16;
inline int32_t encode_entity(const EntityOperand& e) {
  return static_cast<int32_t>(e.kind) * 16 + e.mode;
}
inline EntityOperand decode_entity(int32_t opn1, int32_t opn2) {
  EntityOperand e;
  int32_t enc = opn1 & 0xff;
  e.kind = static_cast<core::Kind>(enc / 16);
  e.mode = enc % 16;
  e.id = opn2;
  return e;
}

struct Triplet {
  int32_t op = op_stop;
  int32_t opn1 = -1;
  int32_t opn2 = -1;

  bool operator==(const Triplet& o) const {
    return op == o.op && opn1 == o.opn1 && opn2 == o.opn2;
  }
};

struct Program {
  std::vector<Triplet> triplets;

  bool operator==(const Program& o) const { return triplets == o.triplets; }
};

inline Triplet halt_triplet() { return {op_stop, -1, -1}; }

}  // namespace rcode
