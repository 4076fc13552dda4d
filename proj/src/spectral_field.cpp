#include "nsstat/spectral_field.hpp"

#include "nsstat/errors.hpp"
#include "nsstat/transform.hpp"

#include <cmath>

namespace nsstat {

SpectralField::SpectralField(LatticePtr lattice)
    : lattice_(std::move(lattice)), coefficients_(ModeMatrix::Zero(lattice_->mode_count(), 3)) {}

SpectralField::SpectralField(LatticePtr lattice, ModeMatrix coefficients)
    : lattice_(std::move(lattice)), coefficients_(std::move(coefficients)) {
  if (coefficients_.rows() != lattice_->mode_count()) {
    throw std::invalid_argument("coefficient rows do not match the lattice mode count");
  }
}

Complex SpectralField::at(int k1, int k2, int k3, int component) const {
  auto hit = lattice_->find(k1, k2, k3);
  if (!hit) return {0.0, 0.0};
  const Complex c = coefficients_(hit->index, component);
  return hit->conjugate ? std::conj(c) : c;
}

double SpectralField::divergence_defect() const {
  if (empty() || coefficients_.rows() == 0) return 0.0;
  const Eigen::VectorXcd div =
      (coefficients_.array() * lattice_->wavevectors().cast<Complex>().array()).rowwise().sum();
  return div.cwiseAbs().maxCoeff();
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_lattice(*this, other);
  coefficients_ += other.coefficients_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_lattice(*this, other);
  coefficients_ -= other.coefficients_;
  return *this;
}

void require_same_lattice(const SpectralField& a, const SpectralField& b) {
  if (a.empty() || b.empty()) throw LatticeMismatchError();
  if (a.lattice_ptr() != b.lattice_ptr() && !(a.lattice() == b.lattice())) throw LatticeMismatchError();
}

double inner(const SpectralField& u, const SpectralField& v) {
  require_same_lattice(u, v);
  // each stored mode stands for the pair {k, -k}
  const double s = (u.coefficients().array() * v.coefficients().array().conjugate()).real().sum();
  return 2.0 * u.lattice().volume() * s;
}

double inner_h1(const SpectralField& u, const SpectralField& v) {
  require_same_lattice(u, v);
  const Eigen::ArrayXd per_mode =
      (u.coefficients().array() * v.coefficients().array().conjugate()).real().rowwise().sum();
  return 2.0 * u.lattice().volume() * (per_mode * u.lattice().eigenvalues()).sum();
}

namespace {
Eigen::ArrayXd mode_energy(const SpectralField& u) { return u.coefficients().cwiseAbs2().rowwise().sum().array(); }
}  // namespace

double l2_norm(const SpectralField& u) {
  return std::sqrt(2.0 * u.lattice().volume() * mode_energy(u).sum());
}

double h1_norm(const SpectralField& u) {
  return std::sqrt(2.0 * u.lattice().volume() * (mode_energy(u) * u.lattice().eigenvalues()).sum());
}

double stokes_norm(const SpectralField& u) {
  return std::sqrt(2.0 * u.lattice().volume() *
                   (mode_energy(u) * u.lattice().eigenvalues().square()).sum());
}

double linf_norm(const SpectralField& u) {
  const GridVector g = to_grid(u);
  return (g[0].square() + g[1].square() + g[2].square()).sqrt().maxCoeff();
}

FieldNorms norms(const SpectralField& u) {
  const Eigen::ArrayXd e = mode_energy(u);
  const Eigen::ArrayXd& lam = u.lattice().eigenvalues();
  const double scale = 2.0 * u.lattice().volume();
  return {std::sqrt(scale * e.sum()), std::sqrt(scale * (e * lam).sum()),
          std::sqrt(scale * (e * lam.square()).sum()), linf_norm(u)};
}

SpectralField stokes_apply(const SpectralField& u) {
  ModeMatrix out = u.lattice().eigenvalues().matrix().asDiagonal() * u.coefficients();
  return SpectralField(u.lattice_ptr(), std::move(out));
}

RawSpectrum::RawSpectrum(LatticePtr lattice) : lattice_(std::move(lattice)) {
  const auto side = static_cast<std::size_t>(2 * lattice_->cutoff() + 1);
  data_.assign(side * side * side, Eigen::Vector3cd::Zero());
}

std::size_t RawSpectrum::offset(int k1, int k2, int k3) const {
  const int K = lattice_->cutoff();
  if (std::abs(k1) > K || std::abs(k2) > K || std::abs(k3) > K) {
    throw std::out_of_range("wavevector outside the active cube");
  }
  const auto side = static_cast<std::size_t>(2 * K + 1);
  return (static_cast<std::size_t>(k1 + K) * side + static_cast<std::size_t>(k2 + K)) * side +
         static_cast<std::size_t>(k3 + K);
}

double RawSpectrum::hermitian_defect() const {
  const int K = lattice_->cutoff();
  double defect = 0.0;
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      for (int k3 = -K; k3 <= K; ++k3) {
        defect = std::max(defect, ((*this)(-k1, -k2, -k3) - (*this)(k1, k2, k3).conjugate()).norm());
      }
  return defect;
}

RawSpectrum to_raw(const SpectralField& u) {
  RawSpectrum raw(u.lattice_ptr());
  const auto& modes = u.lattice().modes();
  for (Eigen::Index i = 0; i < modes.rows(); ++i) {
    const Eigen::Vector3cd c = u.coefficients().row(i).transpose();
    raw(modes(i, 0), modes(i, 1), modes(i, 2)) = c;
    raw(-modes(i, 0), -modes(i, 1), -modes(i, 2)) = c.conjugate();
  }
  return raw;
}

double raw_inner(const RawSpectrum& a, const RawSpectrum& b) {
  if (!(a.lattice() == b.lattice())) throw LatticeMismatchError();
  const int K = a.lattice().cutoff();
  double s = 0.0;
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      for (int k3 = -K; k3 <= K; ++k3) s += a(k1, k2, k3).dot(b(k1, k2, k3)).real();
  return a.lattice().volume() * s;
}

void leray_project_in_place(const WaveVectorLattice& lattice, ModeMatrix& coefficients) {
  const RealModes& k = lattice.wavevectors();
  const Eigen::VectorXcd kdotu =
      (coefficients.array() * k.cast<Complex>().array()).rowwise().sum() /
      lattice.eigenvalues().cast<Complex>();
  coefficients -= (k.cast<Complex>().array().colwise() * kdotu.array()).matrix();
}

SpectralField leray_project(const RawSpectrum& raw) {
  const auto& lattice = raw.lattice();
  double scale = 0.0;
  const int K = lattice.cutoff();
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      for (int k3 = -K; k3 <= K; ++k3) scale = std::max(scale, raw(k1, k2, k3).norm());
  const double defect = raw.hermitian_defect();
  if (defect > 1e-12 * std::max(scale, 1e-300)) throw SymmetryViolationError(defect);

  ModeMatrix c(lattice.mode_count(), 3);
  const auto& modes = lattice.modes();
  for (Eigen::Index i = 0; i < modes.rows(); ++i) {
    c.row(i) = raw(modes(i, 0), modes(i, 1), modes(i, 2)).transpose();
  }
  leray_project_in_place(lattice, c);
  return SpectralField(raw.lattice_ptr(), std::move(c));
}

}  // namespace nsstat
