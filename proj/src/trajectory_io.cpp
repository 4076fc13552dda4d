#include "nsstat/trajectory_io.hpp"

#include "nsstat/errors.hpp"
#include "nsstat/snapshot_io.hpp"

#include <sstream>

namespace nsstat {

namespace {
constexpr std::uint32_t container_version = 1;
}

std::string encode_trajectory(const Trajectory& traj, const FlowParameters& p) {
  std::ostringstream out(std::ios::binary);
  out.write("SNTC", 4);
  io::write_u32(out, container_version);
  write_snapshot(out, p.forcing(), p.viscosity(), 0.0);
  std::vector<std::uint64_t> offsets;
  offsets.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    offsets.push_back(static_cast<std::uint64_t>(out.tellp()));
    write_snapshot(out, traj.state(i), p.viscosity(), traj.time(i));
  }
  const auto footer = static_cast<std::uint64_t>(out.tellp());
  io::write_u64(out, traj.size());
  io::write_u32(out, traj.has_ledger() ? 1u : 0u);
  io::write_f64(out, traj.begin());
  io::write_f64(out, traj.end());
  io::write_u64(out, traj.provenance().size());
  out.write(traj.provenance().data(), static_cast<std::streamsize>(traj.provenance().size()));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    io::write_u64(out, offsets[i]);
    io::write_f64(out, traj.time(i));
    io::write_f64(out, traj.has_ledger() ? traj.ledger()[i].enstrophy : 0.0);
    io::write_f64(out, traj.has_ledger() ? traj.ledger()[i].forcing_work : 0.0);
  }
  io::write_u64(out, footer);
  out.write("SNTI", 4);
  return out.str();
}

StoredTrajectory decode_trajectory(const std::string& bytes) {
  if (bytes.size() < 12 || bytes.compare(bytes.size() - 4, 4, "SNTI") != 0) {
    throw FormatError("missing trajectory index trailer");
  }
  std::istringstream in(bytes, std::ios::binary);
  io::expect_magic(in, "SNTC");
  if (io::read_u32(in) != container_version) throw FormatError("unsupported trajectory container version");
  Snapshot forcing = read_snapshot(in);

  in.seekg(static_cast<std::streamoff>(bytes.size() - 12));
  const std::uint64_t footer = io::read_u64(in);
  in.seekg(static_cast<std::streamoff>(footer));
  const std::uint64_t count = io::read_u64(in);
  const std::uint32_t flags = io::read_u32(in);
  const double begin = io::read_f64(in);
  const double end = io::read_f64(in);
  const std::uint64_t plen = io::read_u64(in);
  if (plen > bytes.size()) throw FormatError("corrupt provenance length");
  std::string provenance(plen, '\0');
  in.read(provenance.data(), static_cast<std::streamsize>(plen));

  struct Entry {
    std::uint64_t offset;
    double time;
    EnergyLedger ledger;
  };
  std::vector<Entry> entries(count);
  for (auto& e : entries) {
    e.offset = io::read_u64(in);
    e.time = io::read_f64(in);
    e.ledger.enstrophy = io::read_f64(in);
    e.ledger.forcing_work = io::read_f64(in);
  }

  std::vector<double> times;
  std::vector<SpectralField> states;
  std::vector<EnergyLedger> ledger;
  for (const auto& e : entries) {
    in.seekg(static_cast<std::streamoff>(e.offset));
    Snapshot s = read_snapshot(in);
    if (s.time != e.time) throw FormatError("index time disagrees with snapshot record");
    times.push_back(s.time);
    states.push_back(std::move(s.field));
    ledger.push_back(e.ledger);
  }
  std::optional<std::vector<EnergyLedger>> maybe_ledger;
  if (flags & 1u) maybe_ledger = std::move(ledger);
  return {Trajectory(begin, end, std::move(times), std::move(states), std::move(maybe_ledger), provenance),
          FlowParameters(forcing.viscosity, std::move(forcing.field))};
}

void write_trajectory(const std::string& path, const Trajectory& traj, const FlowParameters& p) {
  io::write_file_atomic(path, encode_trajectory(traj, p));
}

StoredTrajectory read_trajectory(const std::string& path) { return decode_trajectory(io::read_file(path)); }

}  // namespace nsstat
