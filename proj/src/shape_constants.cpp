#include "nsstat/flow_parameters.hpp"

#include "nsstat/errors.hpp"
#include "nsstat/nonlinear.hpp"
#include "nsstat/random_fields.hpp"

#include <cmath>

namespace nsstat {

double agmon_ratio(const SpectralField& u) {
  const FieldNorms n = norms(u);
  if (n.h1 == 0.0 || n.stokes == 0.0) return 0.0;
  return n.linf / std::sqrt(n.h1 * n.stokes);
}

ShapeConstants estimate_shape_constants(const std::vector<SpectralField>& samples) {
  double c1 = 0.0;
  double c2 = 1.0;
  std::size_t used = 0;
  for (const auto& u : samples) {
    const FieldNorms n = norms(u);
    if (n.h1 == 0.0 || n.stokes == 0.0) continue;
    ++used;
    c1 = std::max(c1, n.linf / std::sqrt(n.h1 * n.stokes));
    const double b = std::abs(trilinear_b(u, u, stokes_apply(u)));
    const double needed = (b - 0.25 * n.stokes * n.stokes) / std::pow(n.h1, 6);
    c2 = std::max(c2, needed);
  }
  if (used == 0) throw Error("every sample for constant estimation is degenerate");
  return ShapeConstants::from(c1, c2, ConstantsProvenance::empirical_lower_bound);
}

ShapeConstants estimate_shape_constants(const LatticePtr& lattice, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("sample count must be at least 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> slope(0.0, 4.0);
  std::uniform_real_distribution<double> log_amp(-3.0, 3.0);
  std::uniform_int_distribution<int> band(1, lattice->cutoff());
  std::vector<SpectralField> set;
  set.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    // amplitudes span several decades because the c2 balance is not scale-invariant
    const double amp = std::pow(10.0, log_amp(rng));
    set.push_back(random_field_with_norm(lattice, rng, amp, slope(rng), band(rng)));
  }
  return estimate_shape_constants(set);
}

}  // namespace nsstat
