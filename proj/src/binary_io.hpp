// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors
//
// Little-endian primitives for the index and trie files.

#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "kgcd/error.hpp"

namespace kgcd::bin {

inline void put_bytes(std::ostream& out, std::uint64_t v, int n) {
  char buf[8];
  for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, n);
}

inline std::uint64_t get_bytes(std::istream& in, int n) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), n)) {
    throw FormatError("binary", 0, "unexpected end of file");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
  return v;
}

inline void put_u16(std::ostream& out, std::uint16_t v) { put_bytes(out, v, 2); }
inline void put_u32(std::ostream& out, std::uint32_t v) { put_bytes(out, v, 4); }
inline void put_u64(std::ostream& out, std::uint64_t v) { put_bytes(out, v, 8); }
inline std::uint16_t get_u16(std::istream& in) {
  return static_cast<std::uint16_t>(get_bytes(in, 2));
}
inline std::uint32_t get_u32(std::istream& in) {
  return static_cast<std::uint32_t>(get_bytes(in, 4));
}
inline std::uint64_t get_u64(std::istream& in) { return get_bytes(in, 8); }

// Element count followed by elements of `element_size` bytes; rejects counts
// that cannot fit in the remaining stream.
inline std::size_t get_count(std::istream& in, std::size_t element_size) {
  const std::uint64_t n = get_u64(in);
  const auto here = in.tellg();
  if (here >= 0) {
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    if (end >= here && element_size > 0 &&
        n > static_cast<std::uint64_t>(end - here) / element_size) {
      throw FormatError("binary", 0, "element count exceeds file size");
    }
  }
  return static_cast<std::size_t>(n);
}

inline void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
  const std::uint32_t n = get_u32(in);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) {
    throw FormatError("binary", 0, "unexpected end of file");
  }
  return s;
}

}  // namespace kgcd::bin
