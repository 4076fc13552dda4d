#include "nsstat/random_fields.hpp"

#include <cmath>
#include <stdexcept>

namespace nsstat {

SpectralField random_field(const LatticePtr& lattice, Rng& rng, double slope, int max_wavenumber) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& modes = lattice->modes();
  const Eigen::ArrayXd& lam = lattice->eigenvalues();
  ModeMatrix c(lattice->mode_count(), 3);
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    const bool keep = max_wavenumber <= 0 || modes.row(i).cwiseAbs().maxCoeff() <= max_wavenumber;
    const double amp = keep ? std::pow(lam(i) / lattice->lambda1(), -0.5 * slope) : 0.0;
    for (int d = 0; d < 3; ++d) {
      const double re = normal(rng);
      const double im = normal(rng);
      c(i, d) = amp * Complex(re, im);
    }
  }
  leray_project_in_place(*lattice, c);
  return SpectralField(lattice, std::move(c));
}

SpectralField random_field_with_norm(const LatticePtr& lattice, Rng& rng, double l2, double slope,
                                     int max_wavenumber) {
  SpectralField u = random_field(lattice, rng, slope, max_wavenumber);
  const double current = l2_norm(u);
  if (current > 0.0) u *= l2 / current;
  return u;
}

SpectralField single_mode(const LatticePtr& lattice, int k1, int k2, int k3, const Eigen::Vector3cd& amplitude) {
  auto hit = lattice->find(k1, k2, k3);
  if (!hit) throw std::invalid_argument("wavevector is not in the active set");
  ModeMatrix c = ModeMatrix::Zero(lattice->mode_count(), 3);
  const Eigen::Vector3cd a = hit->conjugate ? Eigen::Vector3cd(amplitude.conjugate()) : amplitude;
  c.row(hit->index) = a.transpose();
  leray_project_in_place(*lattice, c);
  return SpectralField(lattice, std::move(c));
}

namespace {

void add_mode(const WaveVectorLattice& lattice, ModeMatrix& c, int k1, int k2, int k3, int comp, Complex value) {
  auto hit = lattice.find(k1, k2, k3);
  if (!hit) throw std::invalid_argument("field needs wavevectors outside the active set");
  c(hit->index, comp) += hit->conjugate ? std::conj(value) : value;
}

// a sin(k.x) e_comp = (a / 2i) e^{ik.x} + c.c.;  a cos(k.x) e_comp = (a / 2) e^{ik.x} + c.c.
void add_sin(const WaveVectorLattice& l, ModeMatrix& c, int k1, int k2, int k3, int comp, double a) {
  add_mode(l, c, k1, k2, k3, comp, Complex(0.0, -0.5 * a));
}
void add_cos(const WaveVectorLattice& l, ModeMatrix& c, int k1, int k2, int k3, int comp, double a) {
  add_mode(l, c, k1, k2, k3, comp, Complex(0.5 * a, 0.0));
}

void require_two_pi_box(const WaveVectorLattice& lattice) {
  for (double L : lattice.periods()) {
    if (std::abs(L - two_pi) > 1e-12) throw std::invalid_argument("field is defined on the 2 pi periodic cube only");
  }
}

}  // namespace

SpectralField taylor_green_field(const LatticePtr& lattice, double amplitude) {
  require_two_pi_box(*lattice);
  ModeMatrix c = ModeMatrix::Zero(lattice->mode_count(), 3);
  // sin x1 cos x2 = [sin(x1 + x2) + sin(x1 - x2)] / 2
  add_sin(*lattice, c, 1, 1, 0, 0, 0.5 * amplitude);
  add_sin(*lattice, c, 1, -1, 0, 0, 0.5 * amplitude);
  // -cos x1 sin x2 = -[sin(x1 + x2) - sin(x1 - x2)] / 2
  add_sin(*lattice, c, 1, 1, 0, 1, -0.5 * amplitude);
  add_sin(*lattice, c, 1, -1, 0, 1, 0.5 * amplitude);
  return SpectralField(lattice, std::move(c));
}

SpectralField abc_field(const LatticePtr& lattice, double a, double b, double cc) {
  require_two_pi_box(*lattice);
  ModeMatrix c = ModeMatrix::Zero(lattice->mode_count(), 3);
  add_sin(*lattice, c, 0, 0, 1, 0, a);
  add_cos(*lattice, c, 0, 1, 0, 0, cc);
  add_sin(*lattice, c, 1, 0, 0, 1, b);
  add_cos(*lattice, c, 0, 0, 1, 1, a);
  add_sin(*lattice, c, 0, 1, 0, 2, cc);
  add_cos(*lattice, c, 1, 0, 0, 2, b);
  return SpectralField(lattice, std::move(c));
}

}  // namespace nsstat
