#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace stlearn {

// Binary payloads are little-endian f32 regardless of host order.

inline void append_f32_le(std::vector<unsigned char>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  out.push_back(static_cast<unsigned char>(bits & 0xffu));
  out.push_back(static_cast<unsigned char>((bits >> 8) & 0xffu));
  out.push_back(static_cast<unsigned char>((bits >> 16) & 0xffu));
  out.push_back(static_cast<unsigned char>((bits >> 24) & 0xffu));
}

inline float f32_from_le(const unsigned char* p) {
  std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                       (static_cast<std::uint32_t>(p[1]) << 8) |
                       (static_cast<std::uint32_t>(p[2]) << 16) |
                       (static_cast<std::uint32_t>(p[3]) << 24);
  float v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

inline void append_f32_span_le(std::vector<unsigned char>& out,
                               std::span<const float> values) {
  out.reserve(out.size() + values.size() * 4);
  for (float v : values) append_f32_le(out, v);
}

inline std::vector<float> f32_vector_from_le(std::span<const unsigned char> bytes) {
  if (bytes.size() % 4 != 0) {
    throw std::runtime_error("binary payload length is not a multiple of 4");
  }
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f32_from_le(bytes.data() + i * 4);
  return out;
}

inline void write_bytes(std::ostream& os, std::span<const unsigned char> bytes) {
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("write failed");
}

inline std::vector<unsigned char> read_all_bytes(std::istream& is) {
  std::vector<unsigned char> bytes;
  char buf[1 << 14];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    bytes.insert(bytes.end(), reinterpret_cast<unsigned char*>(buf),
                 reinterpret_cast<unsigned char*>(buf) + is.gcount());
  }
  return bytes;
}

}  // namespace stlearn
