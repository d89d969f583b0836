#pragma once

#include <string>

#include "rcode/ops.h"

namespace rcode {

// Human-readable disassembly. One line per triplet, columns joined by two
// spaces: zero-padded line number, opcode name, decoded operands. Entity
// operands render their kind (Thread/Group/Node) or addressing sigil, roles
// render as Manager/Assistant, compare operators as symbols. Unknown opcodes
// keep their raw integer so a damaged program still lists.
std::string render_listing(const Program& p);

}  // namespace rcode
