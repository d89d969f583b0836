#include "rcode/serialize.h"

namespace rcode {

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_i32(std::vector<uint8_t>& out, int32_t v) { put_u32(out, static_cast<uint32_t>(v)); }

uint32_t get_u32(const std::vector<uint8_t>& b, size_t at) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<uint8_t> serialize(const Program& p) {
  std::vector<uint8_t> out;
  out.reserve(10 + p.triplets.size() * 12);
  out.push_back('R');
  out.push_back('C');
  out.push_back('O');
  out.push_back('D');
  put_u16(out, rcode_version);
  put_u32(out, static_cast<uint32_t>(p.triplets.size()));
  for (const Triplet& t : p.triplets) {
    put_i32(out, t.op);
    put_i32(out, t.opn1);
    put_i32(out, t.opn2);
  }
  return out;
}

DecodeResult deserialize(const std::vector<uint8_t>& bytes) {
  DecodeResult r;
  if (bytes.size() < 4 || bytes[0] != 'R' || bytes[1] != 'C' || bytes[2] != 'O' || bytes[3] != 'D') {
    r.error = "bad magic at byte offset 0";
    return r;
  }
  if (bytes.size() < 6) {
    r.error = "truncated version field at byte offset 4";
    return r;
  }
  uint16_t version = static_cast<uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != rcode_version) {
    r.error = "unsupported version " + std::to_string(version) + " at byte offset 4";
    return r;
  }
  if (bytes.size() < 10) {
    r.error = "truncated count field at byte offset 6";
    return r;
  }
  uint32_t count = get_u32(bytes, 6);
  size_t need = 10 + static_cast<size_t>(count) * 12;
  if (bytes.size() < need) {
    r.error = "truncated payload: need " + std::to_string(need) + " bytes, have " +
              std::to_string(bytes.size()) + " (failure at byte offset " +
              std::to_string(bytes.size()) + ")";
    return r;
  }
  r.program.triplets.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    size_t at = 10 + static_cast<size_t>(i) * 12;
    Triplet t;
    t.op = static_cast<int32_t>(get_u32(bytes, at));
    t.opn1 = static_cast<int32_t>(get_u32(bytes, at + 4));
    t.opn2 = static_cast<int32_t>(get_u32(bytes, at + 8));
    r.program.triplets.push_back(t);
  }
  r.ok = true;
  return r;
}

}  // namespace rcode
