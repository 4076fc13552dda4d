#include "nsstat/errors.hpp"
#include "nsstat/measures.hpp"
#include "nsstat/snapshot_io.hpp"

#include "json.hpp"

#include <sstream>

namespace nsstat {

namespace {
constexpr std::uint32_t measure_version = 1;
}

std::string encode_measure(const EmpiricalMeasure& m, double viscosity) {
  nlohmann::json header;
  const auto& prov = m.provenance();
  header["kind"] = prov.kind;
  header["source"] = prov.source;
  header["window_start"] = prov.window_start ? nlohmann::json(*prov.window_start) : nlohmann::json(nullptr);
  header["window_length"] = prov.window_length ? nlohmann::json(*prov.window_length) : nlohmann::json(nullptr);
  header["viscosity"] = viscosity;
  header["atoms"] = m.size();
  const std::string text = header.dump();

  std::ostringstream out;
  out.write("SNSM", 4);
  io::write_u32(out, measure_version);
  io::write_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  io::write_u64(out, m.size());
  for (const auto& atom : m.atoms()) write_snapshot(out, atom, viscosity, 0.0);
  for (double w : m.weights()) io::write_f64(out, w);
  return out.str();
}

EmpiricalMeasure decode_measure(const std::string& bytes) {
  std::istringstream in(bytes);
  io::expect_magic(in, "SNSM");
  if (io::read_u32(in) != measure_version) throw FormatError("unsupported measure file version");
  const std::uint64_t len = io::read_u64(in);
  if (len > bytes.size()) throw FormatError("measure header length exceeds file size");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw FormatError("truncated measure header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed measure header: ") + e.what());
  }
  const std::uint64_t count = io::read_u64(in);
  if (header.value("atoms", std::uint64_t{0}) != count) throw FormatError("atom count disagrees with header");
  std::vector<SpectralField> atoms;
  atoms.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) atoms.push_back(read_snapshot(in).field);
  std::vector<double> weights(count);
  for (auto& w : weights) w = io::read_f64(in);

  MeasureProvenance prov;
  prov.kind = header.value("kind", std::string{});
  prov.source = header.value("source", std::string{});
  if (header.contains("window_start") && header["window_start"].is_number()) {
    prov.window_start = header["window_start"].get<double>();
  }
  if (header.contains("window_length") && header["window_length"].is_number()) {
    prov.window_length = header["window_length"].get<double>();
  }
  try {
    return EmpiricalMeasure(std::move(weights), std::move(atoms), std::move(prov));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid measure: ") + e.what());
  }
}

void write_measure(const std::string& path, const EmpiricalMeasure& m, double viscosity) {
  io::write_file_atomic(path, encode_measure(m, viscosity));
}

EmpiricalMeasure read_measure(const std::string& path) { return decode_measure(io::read_file(path)); }

}  // namespace nsstat
