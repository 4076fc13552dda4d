#pragma once

#include "nsstat/spectral_field.hpp"

#include <string>

namespace nsstat {

/*
 * Viscosity and time-independent forcing of the Galerkin system, with the
 * derived first eigenvalue lambda_1, Grashof number G = |f| / (nu^2 lambda_1^{3/4})
 * and absorbing-ball radius R_0 = |f| / (nu lambda_1).
 */
class FlowParameters {
 public:
  FlowParameters(double viscosity, SpectralField forcing);

  double viscosity() const { return nu_; }
  const SpectralField& forcing() const { return forcing_; }
  const LatticePtr& lattice_ptr() const { return forcing_.lattice_ptr(); }
  const WaveVectorLattice& lattice() const { return forcing_.lattice(); }

  double lambda1() const { return lambda1_; }
  double forcing_norm() const { return forcing_norm_; }
  double grashof() const { return grashof_; }
  double absorbing_radius() const { return r0_; }

 private:
  double nu_;
  SpectralField forcing_;
  double lambda1_;
  double forcing_norm_;
  double grashof_;
  double r0_;
};

double grashof_number(double forcing_norm, double viscosity, double lambda1);
double absorbing_radius(double forcing_norm, double viscosity, double lambda1);

enum class ConstantsProvenance { user_supplied, empirical_lower_bound };

std::string to_string(ConstantsProvenance p);

/*
 * Shape constants of the box: c1 (Agmon), c2 (trilinear estimate, >= 1), and the
 * derived c3 = 2/3 + c2^{1/3}, c4 = max{1, c2^{3/2}}.
 */
struct ShapeConstants {
  double c1 = 0.0;
  double c2 = 1.0;
  double c3 = 0.0;
  double c4 = 0.0;
  ConstantsProvenance provenance = ConstantsProvenance::user_supplied;

  static ShapeConstants from(double c1, double c2, ConstantsProvenance provenance);
};

/*
 * Empirical lower bounds for c1 and c2 from random fields on the lattice:
 *   c1 = max |u|_inf / (||u||^{1/2} |Au|^{1/2}),
 *   c2 = max{1, max (|b(u, u, Au)| - |Au|^2 / 4) / ||u||^6}  (reference nu = 1).
 * Zero samples are skipped; throws when every sample is degenerate.
 */
ShapeConstants estimate_shape_constants(const LatticePtr& lattice, int samples, std::uint64_t seed);

/// Same estimate over a caller-supplied sample set.
ShapeConstants estimate_shape_constants(const std::vector<SpectralField>& samples);

/// |u|_inf / (||u||^{1/2} |Au|^{1/2}); 0 for the zero field.
double agmon_ratio(const SpectralField& u);

}  // namespace nsstat
