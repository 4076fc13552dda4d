#include "nsstat/observables.hpp"

#include "nsstat/errors.hpp"

#include <cmath>
#include <sstream>

namespace nsstat {

Observable energy_observable() {
  return {"energy", [](const SpectralField& u) {
            const double n = l2_norm(u);
            return 0.5 * n * n;
          }};
}

Observable enstrophy_observable() {
  return {"enstrophy", [](const SpectralField& u) {
            const double n = h1_norm(u);
            return n * n;
          }};
}

Observable stokes_moment_observable() {
  return {"stokes23", [](const SpectralField& u) { return std::cbrt(stokes_norm(u) * stokes_norm(u)); }};
}

Observable linf_observable() {
  return {"linf", [](const SpectralField& u) { return linf_norm(u); }};
}

Observable mode_observable(int k1, int k2, int k3, int component, bool imaginary) {
  std::ostringstream name;
  name << "mode:" << k1 << ',' << k2 << ',' << k3 << ':' << component << ':' << (imaginary ? "im" : "re");
  return {name.str(), [=](const SpectralField& u) {
            const Complex c = u.at(k1, k2, k3, component);
            return imaginary ? c.imag() : c.real();
          }};
}

Observable projection_observable(std::string name, SpectralField direction) {
  const double norm = l2_norm(direction);
  if (!(norm > 0.0)) throw std::invalid_argument("projection direction is zero");
  return {std::move(name), [dir = std::move(direction), norm](const SpectralField& u) { return inner(u, dir) / norm; }};
}

Observable parse_observable(const std::string& spec, const std::optional<SpectralField>& forcing) {
  if (spec == "energy") return energy_observable();
  if (spec == "enstrophy") return enstrophy_observable();
  if (spec == "stokes23") return stokes_moment_observable();
  if (spec == "linf") return linf_observable();
  if (spec == "forcing") {
    if (!forcing) throw Error("observable 'forcing' needs the forcing field");
    return projection_observable("forcing", *forcing);
  }
  if (spec.rfind("mode:", 0) == 0) {
    int k1 = 0, k2 = 0, k3 = 0, c = 0;
    char part[3] = {};
    if (std::sscanf(spec.c_str(), "mode:%d,%d,%d:%d:%2s", &k1, &k2, &k3, &c, part) == 5 && c >= 0 && c < 3) {
      const std::string p(part);
      if (p == "re" || p == "im") return mode_observable(k1, k2, k3, c, p == "im");
    }
  }
  throw Error("unknown observable '" + spec + "'");
}

}  // namespace nsstat
