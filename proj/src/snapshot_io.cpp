#include "nsstat/snapshot_io.hpp"

#include "nsstat/errors.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nsstat {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace io {

void write_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void write_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void write_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

namespace {
template <typename T>
T read_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw FormatError("unexpected end of stream");
  return v;
}
}  // namespace

std::uint32_t read_u32(std::istream& in) { return read_raw<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return read_raw<std::uint64_t>(in); }
double read_f64(std::istream& in) { return read_raw<double>(in); }

void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4];
  in.read(got, 4);
  if (!in || std::memcmp(got, magic, 4) != 0) {
    throw FormatError(std::string("bad magic, expected ") + magic);
  }
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace io

std::size_t snapshot_bytes(const WaveVectorLattice& lattice) {
  return 4 + 4 + 4 + 8 * 5 + static_cast<std::size_t>(lattice.mode_count()) * 6 * 8;
}

void write_snapshot(std::ostream& out, const SpectralField& field, double viscosity, double time) {
  const auto& lattice = field.lattice();
  out.write("SNSE", 4);
  io::write_u32(out, snapshot_version);
  io::write_u32(out, static_cast<std::uint32_t>(lattice.resolution()));
  for (double L : lattice.periods()) io::write_f64(out, L);
  io::write_f64(out, viscosity);
  io::write_f64(out, time);
  const ModeMatrix& c = field.coefficients();
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (int d = 0; d < 3; ++d) {
      io::write_f64(out, c(i, d).real());
      io::write_f64(out, c(i, d).imag());
    }
  }
}

Snapshot read_snapshot(std::istream& in) {
  io::expect_magic(in, "SNSE");
  const std::uint32_t version = io::read_u32(in);
  if (version != snapshot_version) throw FormatError("unsupported snapshot version " + std::to_string(version));
  const auto n = static_cast<int>(io::read_u32(in));
  std::array<double, 3> periods{};
  for (double& L : periods) L = io::read_f64(in);
  Snapshot snap;
  snap.viscosity = io::read_f64(in);
  snap.time = io::read_f64(in);
  auto lattice = WaveVectorLattice::create(n, periods);
  ModeMatrix c(lattice->mode_count(), 3);
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (int d = 0; d < 3; ++d) {
      const double re = io::read_f64(in);
      const double im = io::read_f64(in);
      c(i, d) = Complex(re, im);
    }
  }
  snap.field = SpectralField(std::move(lattice), std::move(c));
  return snap;
}

}  // namespace nsstat
