#pragma once

// Little-endian helpers for the MU3G / MU3F grid containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "mu3/errors.hpp"
#include "mu3/linkmaps.hpp"

namespace mu3::detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

inline void write_f64(std::ostream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline double read_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError("truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

inline void write_header(std::ostream& out, const char magic[4], const GridShape& shape) {
  out.write(magic, 4);
  if (shape.is_cubic()) {
    write_u32(out, 1);
    write_u32(out, static_cast<std::uint32_t>(shape.ns));
  } else {
    write_u32(out, 2);
    write_u32(out, static_cast<std::uint32_t>(shape.ns));
    write_u32(out, static_cast<std::uint32_t>(shape.nt));
    write_u32(out, static_cast<std::uint32_t>(shape.nu));
  }
  out.write("stu\0", 4);
}

inline GridShape read_header(std::istream& in, const char magic[4]) {
  char m[4];
  if (!in.read(m, 4) || std::memcmp(m, magic, 4) != 0) {
    throw IoError(std::string("bad magic, expected ") + std::string(magic, 4));
  }
  const std::uint32_t version = read_u32(in);
  GridShape shape;
  if (version == 1) {
    shape = GridShape::cubic(static_cast<int>(read_u32(in)));
  } else if (version == 2) {
    shape.ns = static_cast<int>(read_u32(in));
    shape.nt = static_cast<int>(read_u32(in));
    shape.nu = static_cast<int>(read_u32(in));
  } else {
    throw IoError("unsupported container version " + std::to_string(version));
  }
  char order[4];
  if (!in.read(order, 4) || std::memcmp(order, "stu\0", 4) != 0) {
    throw IoError("unsupported axis order");
  }
  if (shape.ns <= 0 || shape.nt <= 0 || shape.nu <= 0 || shape.size() > (1u << 30)) {
    throw IoError("implausible grid shape");
  }
  return shape;
}

}  // namespace mu3::detail
