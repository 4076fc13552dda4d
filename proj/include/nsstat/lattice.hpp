#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

namespace nsstat {

using Complex = std::complex<double>;

/// Coefficients of a vector field: one row per stored wavevector, one column per component.
using ModeMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, 3>;
using IntModes = Eigen::Matrix<int, Eigen::Dynamic, 3>;
using RealModes = Eigen::Matrix<double, Eigen::Dynamic, 3>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/*
 * Integer wavevectors of a periodic box with periods L_1, L_2, L_3 sampled on an
 * n^3 grid. The active set is the 2/3-rule dealiased cube 0 < max|k_i| <= K with
 * K = floor((n - 1) / 3), so quadratic products of active fields are computed
 * without aliasing on the n^3 grid.
 *
 * Only one representative of each pair {k, -k} is stored (the "positive half":
 * k_3 > 0, or k_3 = 0 and k_2 > 0, or k_3 = k_2 = 0 and k_1 > 0), in
 * lexicographic (k_1, k_2, k_3) order. The coefficient at -k is the conjugate.
 */
class WaveVectorLattice {
 public:
  WaveVectorLattice(int n, std::array<double, 3> periods);

  /// Shared, cached instance; equal (n, periods) give the same object.
  static std::shared_ptr<const WaveVectorLattice> create(
      int n, std::array<double, 3> periods = {two_pi, two_pi, two_pi});

  int resolution() const { return n_; }
  int cutoff() const { return cutoff_; }
  const std::array<double, 3>& periods() const { return periods_; }
  double volume() const { return periods_[0] * periods_[1] * periods_[2]; }
  std::size_t grid_points() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  Eigen::Index mode_count() const { return modes_.rows(); }
  const IntModes& modes() const { return modes_; }
  /// Physical wavevectors 2 pi k_i / L_i.
  const RealModes& wavevectors() const { return wavevectors_; }
  /// Stokes eigenvalues lambda(k) = |2 pi k / L|^2.
  const Eigen::ArrayXd& eigenvalues() const { return eigenvalues_; }
  double lambda1() const { return lambda1_; }

  struct Lookup {
    Eigen::Index index;
    bool conjugate;  // true when k is the mirror of the stored mode
  };
  /// Stored mode for k or -k; nullopt for k = 0 or outside the active cube.
  std::optional<Lookup> find(int k1, int k2, int k3) const;
  bool is_active(int k1, int k2, int k3) const;

  /// Offsets into the n x n x (n/2+1) half-complex FFT layout.
  const std::vector<std::size_t>& fft_offsets() const { return fft_offsets_; }
  /// For modes in the k_3 = 0 plane, offset of -k in the same layout; others hold npos.
  const std::vector<std::size_t>& fft_mirror_offsets() const { return fft_mirror_offsets_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool operator==(const WaveVectorLattice& other) const {
    return n_ == other.n_ && periods_ == other.periods_;
  }

 private:
  int n_;
  int cutoff_;
  std::array<double, 3> periods_;
  IntModes modes_;
  RealModes wavevectors_;
  Eigen::ArrayXd eigenvalues_;
  double lambda1_ = 0.0;
  std::vector<int> table_;  // (2K+1)^3 cube -> stored index, or -1
  std::vector<std::size_t> fft_offsets_;
  std::vector<std::size_t> fft_mirror_offsets_;
};

using LatticePtr = std::shared_ptr<const WaveVectorLattice>;

/// True for the stored representative of {k, -k}.
constexpr bool in_positive_half(int k1, int k2, int k3) {
  return k3 > 0 || (k3 == 0 && (k2 > 0 || (k2 == 0 && k1 > 0)));
}

}  // namespace nsstat
