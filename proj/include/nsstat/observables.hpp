#pragma once

#include "nsstat/spectral_field.hpp"

#include <functional>
#include <optional>
#include <string>

namespace nsstat {

using ObservableFn = std::function<double(const SpectralField&)>;

/// Scalar functional of the state with a stable name used in reports and set specs.
struct Observable {
  std::string name;
  ObservableFn evaluate;

  double operator()(const SpectralField& u) const { return evaluate(u); }
};

Observable energy_observable();        // |u|^2 / 2
Observable enstrophy_observable();     // ||u||^2
Observable stokes_moment_observable(); // |Au|^{2/3}
Observable linf_observable();          // |u|_inf
/// Real or imaginary part of component c of the coefficient at k.
Observable mode_observable(int k1, int k2, int k3, int component, bool imaginary);
/// (u, v) / |v|
Observable projection_observable(std::string name, SpectralField direction);

/*
 * Parses "energy", "enstrophy", "stokes23", "linf", "mode:k1,k2,k3:c:re|im",
 * and "forcing" (projection on the supplied forcing direction).
 */
Observable parse_observable(const std::string& spec, const std::optional<SpectralField>& forcing = std::nullopt);

}  // namespace nsstat
