#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcode/ops.h"

namespace rcode {

// Binary layout: "RCOD", u16 version (LE), u32 triplet count (LE),
// then count * 3 * i32 (LE, two's complement).
inline constexpr uint16_t rcode_version = 1;

std::vector<uint8_t> serialize(const Program& p);

struct DecodeResult {
  bool ok = false;
  Program program;
  std::string error;   // mentions the byte offset of the failure
};

DecodeResult deserialize(const std::vector<uint8_t>& bytes);

}  // namespace rcode
