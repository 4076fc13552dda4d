#pragma once

#include "nsstat/spectral_field.hpp"

#include <iosfwd>

namespace nsstat {

/*
 * Snapshot record, little-endian:
 *   "SNSE" | u32 version | u32 n | f64 L_1, L_2, L_3 | f64 nu | f64 time |
 *   per stored mode (lexicographic over the positive half of the active cube):
 *   (re, im) f64 for components 1, 2, 3.
 */
struct Snapshot {
  SpectralField field;
  double viscosity = 0.0;
  double time = 0.0;
};

inline constexpr std::uint32_t snapshot_version = 1;

void write_snapshot(std::ostream& out, const SpectralField& field, double viscosity, double time);
Snapshot read_snapshot(std::istream& in);

/// Size in bytes of one record on the given lattice.
std::size_t snapshot_bytes(const WaveVectorLattice& lattice);

namespace io {

void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
void expect_magic(std::istream& in, const char (&magic)[5]);

/// Writes through a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace io
}  // namespace nsstat
