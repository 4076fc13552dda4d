#pragma once

#include "nsstat/lattice.hpp"

#include <utility>

namespace nsstat {

/*
 * Divergence-free, zero-mean, real vector field on a periodic box, stored as
 * truncated Fourier coefficients over the positive half of the active lattice:
 *
 *   u(x) = sum_k u_hat(k) exp(i k' . x),   k' = 2 pi k / L,   u_hat(-k) = conj(u_hat(k)).
 *
 * Hermitian symmetry and the zero mean are structural. Divergence-freeness is
 * maintained by every operation that produces a field; leray_project() is the
 * entry point for arbitrary coefficients.
 */
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(LatticePtr lattice);
  SpectralField(LatticePtr lattice, ModeMatrix coefficients);

  const LatticePtr& lattice_ptr() const { return lattice_; }
  const WaveVectorLattice& lattice() const { return *lattice_; }
  bool empty() const { return !lattice_; }

  const ModeMatrix& coefficients() const { return coefficients_; }
  ModeMatrix& coefficients() { return coefficients_; }

  /// Coefficient of component c at an arbitrary active k (conjugated for the mirrored half).
  Complex at(int k1, int k2, int k3, int component) const;

  /// max_k |k' . u_hat(k)|, zero up to rounding for a valid field.
  double divergence_defect() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) {
    coefficients_ *= s;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  LatticePtr lattice_;
  ModeMatrix coefficients_;
};

/// Throws LatticeMismatchError unless both fields share a lattice.
void require_same_lattice(const SpectralField& a, const SpectralField& b);

/// L2 inner product, carrying the box volume.
double inner(const SpectralField& u, const SpectralField& v);
/// H1 (gradient) inner product ((u, v)).
double inner_h1(const SpectralField& u, const SpectralField& v);

double l2_norm(const SpectralField& u);
double h1_norm(const SpectralField& u);
/// |Au|_{L2}
double stokes_norm(const SpectralField& u);
/// max over the n^3 physical grid of |u(x)|
double linf_norm(const SpectralField& u);

struct FieldNorms {
  double l2 = 0.0;
  double h1 = 0.0;
  double stokes = 0.0;
  double linf = 0.0;
};
FieldNorms norms(const SpectralField& u);

/// Au, diagonal with eigenvalue lambda(k) per mode.
SpectralField stokes_apply(const SpectralField& u);

/// Coefficients on the full active cube [-K, K]^3 with no symmetry or divergence constraint.
class RawSpectrum {
 public:
  explicit RawSpectrum(LatticePtr lattice);

  const WaveVectorLattice& lattice() const { return *lattice_; }
  const LatticePtr& lattice_ptr() const { return lattice_; }

  Eigen::Vector3cd& operator()(int k1, int k2, int k3) { return data_[offset(k1, k2, k3)]; }
  const Eigen::Vector3cd& operator()(int k1, int k2, int k3) const { return data_[offset(k1, k2, k3)]; }

  /// Largest |raw(-k) - conj(raw(k))| over the cube.
  double hermitian_defect() const;

 private:
  std::size_t offset(int k1, int k2, int k3) const;

  LatticePtr lattice_;
  std::vector<Eigen::Vector3cd> data_;
};

/// Expands a field onto the full cube (mirrored modes conjugated).
RawSpectrum to_raw(const SpectralField& u);

/// L2 inner product of raw spectra (real part, with volume factor).
double raw_inner(const RawSpectrum& a, const RawSpectrum& b);

/*
 * Leray projection u_hat(k) -> u_hat(k) - k'(k' . u_hat(k)) / |k'|^2 of a
 * Hermitian-symmetric raw spectrum. Throws SymmetryViolationError when the
 * input is not the spectrum of a real field (relative tolerance 1e-12).
 */
SpectralField leray_project(const RawSpectrum& raw);

/// Projection of half-lattice coefficients, used internally by the nonlinear term.
void leray_project_in_place(const WaveVectorLattice& lattice, ModeMatrix& coefficients);

}  // namespace nsstat
