#pragma once

#include <string>

#include "acfb/field.hpp"

namespace acfb {

// Binary snapshot, little-endian, CRC32-guarded:
//   magic "ACFB", version u16=1, n u8, m u8, extents u32 per axis, h f64,
//   origin f64 per axis, alpha f64, N_wells u16, wells f64 x m each,
//   values row-major f64, dirichlet mask packed bits row-major,
//   CRC32 over everything before the checksum.
// Round-trips are bit-exact.
void save_snapshot(const VectorField& f, const std::string& path);
VectorField load_snapshot(const std::string& path);

std::uint32_t crc32_ieee(const unsigned char* data, std::size_t len);

}  // namespace acfb
