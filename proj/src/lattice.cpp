#include "nsstat/lattice.hpp"

#include "nsstat/errors.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace nsstat {

WaveVectorLattice::WaveVectorLattice(int n, std::array<double, 3> periods)
    : n_(n), cutoff_((n - 1) / 3), periods_(periods) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("lattice resolution must be even and >= 4");
  }
  for (double L : periods_) {
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("box periods must be positive");
  }

  const int K = cutoff_;
  const int side = 2 * K + 1;
  table_.assign(static_cast<std::size_t>(side) * side * side, -1);

  std::vector<std::array<int, 3>> stored;
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      for (int k3 = -K; k3 <= K; ++k3) {
        if (in_positive_half(k1, k2, k3)) stored.push_back({k1, k2, k3});
      }
    }
  }

  const auto count = static_cast<Eigen::Index>(stored.size());
  modes_.resize(count, 3);
  wavevectors_.resize(count, 3);
  eigenvalues_.resize(count);
  fft_offsets_.resize(stored.size());
  fft_mirror_offsets_.assign(stored.size(), npos);

  const std::size_t nz = static_cast<std::size_t>(n) / 2 + 1;
  auto wrap = [n](int k) { return static_cast<std::size_t>((k % n + n) % n); };
  auto cube = [K, side](int k1, int k2, int k3) {
    return (static_cast<std::size_t>(k1 + K) * side + static_cast<std::size_t>(k2 + K)) * side +
           static_cast<std::size_t>(k3 + K);
  };

  lambda1_ = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& k = stored[static_cast<std::size_t>(i)];
    double lam = 0.0;
    for (int c = 0; c < 3; ++c) {
      modes_(i, c) = k[c];
      wavevectors_(i, c) = two_pi * k[c] / periods_[c];
      lam += wavevectors_(i, c) * wavevectors_(i, c);
    }
    eigenvalues_(i) = lam;
    lambda1_ = std::min(lambda1_, lam);
    table_[cube(k[0], k[1], k[2])] = static_cast<int>(i);
    fft_offsets_[static_cast<std::size_t>(i)] =
        (wrap(k[0]) * n + wrap(k[1])) * nz + static_cast<std::size_t>(k[2]);
    if (k[2] == 0) {
      fft_mirror_offsets_[static_cast<std::size_t>(i)] = (wrap(-k[0]) * n + wrap(-k[1])) * nz;
    }
  }
}

LatticePtr WaveVectorLattice::create(int n, std::array<double, 3> periods) {
  static std::mutex mutex;
  static std::map<std::pair<int, std::array<double, 3>>, std::weak_ptr<const WaveVectorLattice>> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(n, periods);
  if (auto it = cache.find(key); it != cache.end()) {
    if (auto existing = it->second.lock()) return existing;
  }
  auto lattice = std::make_shared<const WaveVectorLattice>(n, periods);
  cache[key] = lattice;
  return lattice;
}

std::optional<WaveVectorLattice::Lookup> WaveVectorLattice::find(int k1, int k2, int k3) const {
  const int K = cutoff_;
  if (std::abs(k1) > K || std::abs(k2) > K || std::abs(k3) > K) return std::nullopt;
  if (k1 == 0 && k2 == 0 && k3 == 0) return std::nullopt;
  const bool mirrored = !in_positive_half(k1, k2, k3);
  if (mirrored) {
    k1 = -k1;
    k2 = -k2;
    k3 = -k3;
  }
  const int side = 2 * K + 1;
  const int idx = table_[(static_cast<std::size_t>(k1 + K) * side + static_cast<std::size_t>(k2 + K)) * side +
                         static_cast<std::size_t>(k3 + K)];
  return Lookup{idx, mirrored};
}

bool WaveVectorLattice::is_active(int k1, int k2, int k3) const { return find(k1, k2, k3).has_value(); }

}  // namespace nsstat
