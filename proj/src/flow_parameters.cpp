#include "nsstat/flow_parameters.hpp"

#include <cmath>
#include <stdexcept>

namespace nsstat {

double grashof_number(double forcing_norm, double viscosity, double lambda1) {
  return forcing_norm / (viscosity * viscosity * std::pow(lambda1, 0.75));
}

double absorbing_radius(double forcing_norm, double viscosity, double lambda1) {
  return forcing_norm / (viscosity * lambda1);
}

FlowParameters::FlowParameters(double viscosity, SpectralField forcing)
    : nu_(viscosity), forcing_(std::move(forcing)) {
  if (!(nu_ > 0.0) || !std::isfinite(nu_)) throw std::invalid_argument("viscosity must be positive");
  if (forcing_.empty()) throw std::invalid_argument("forcing needs a lattice");
  lambda1_ = forcing_.lattice().lambda1();
  forcing_norm_ = l2_norm(forcing_);
  const double kmax = std::sqrt(forcing_.lattice().eigenvalues().maxCoeff());
  const double scale = forcing_.coefficients().cwiseAbs().maxCoeff() * kmax;
  if (forcing_.divergence_defect() > 1e-12 * std::max(scale, 1e-300)) {
    throw std::invalid_argument("forcing is not divergence-free");
  }
  grashof_ = nsstat::grashof_number(forcing_norm_, nu_, lambda1_);
  r0_ = nsstat::absorbing_radius(forcing_norm_, nu_, lambda1_);
}

std::string to_string(ConstantsProvenance p) {
  return p == ConstantsProvenance::user_supplied ? "user-supplied" : "empirical-lower-bound";
}

ShapeConstants ShapeConstants::from(double c1, double c2, ConstantsProvenance provenance) {
  if (!(c1 >= 0.0)) throw std::invalid_argument("c1 must be nonnegative");
  if (!(c2 >= 1.0)) throw std::invalid_argument("c2 must be at least 1");
  ShapeConstants c;
  c.c1 = c1;
  c.c2 = c2;
  c.c3 = 2.0 / 3.0 + std::cbrt(c2);
  c.c4 = std::max(1.0, std::pow(c2, 1.5));
  c.provenance = provenance;
  return c;
}

}  // namespace nsstat
