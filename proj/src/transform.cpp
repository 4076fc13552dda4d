#include "nsstat/transform.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace nsstat {
namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : data(fftw_malloc(bytes)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* data;
};

// Plans are created once per resolution with FFTW_ESTIMATE so results are
// reproducible run to run; execution uses the thread-safe new-array interface.
struct Plans {
  explicit Plans(int n) {
    const std::size_t real_size = static_cast<std::size_t>(n) * n * n;
    const std::size_t complex_size = static_cast<std::size_t>(n) * n * (n / 2 + 1);
    FftwBuffer r(real_size * sizeof(double));
    FftwBuffer c(complex_size * sizeof(fftw_complex));
    forward = fftw_plan_dft_r2c_3d(n, n, n, static_cast<double*>(r.data), static_cast<fftw_complex*>(c.data),
                                   FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_3d(n, n, n, static_cast<fftw_complex*>(c.data), static_cast<double*>(r.data),
                                    FFTW_ESTIMATE);
  }
  ~Plans() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  fftw_plan forward;
  fftw_plan backward;
};

const Plans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plans>(n);
  return *slot;
}

std::size_t half_size(const WaveVectorLattice& lattice) {
  const auto n = static_cast<std::size_t>(lattice.resolution());
  return n * n * (n / 2 + 1);
}

}  // namespace

GridScalar to_grid(const WaveVectorLattice& lattice, const Eigen::Ref<const Eigen::VectorXcd>& column) {
  const auto& plans = plans_for(lattice.resolution());
  const std::size_t csize = half_size(lattice);
  FftwBuffer spectrum(csize * sizeof(fftw_complex));
  FftwBuffer values(lattice.grid_points() * sizeof(double));
  auto* c = static_cast<Complex*>(spectrum.data);
  std::fill(c, c + csize, Complex(0.0, 0.0));

  const auto& offsets = lattice.fft_offsets();
  const auto& mirrors = lattice.fft_mirror_offsets();
  for (Eigen::Index i = 0; i < lattice.mode_count(); ++i) {
    const auto s = static_cast<std::size_t>(i);
    c[offsets[s]] = column(i);
    if (mirrors[s] != WaveVectorLattice::npos) c[mirrors[s]] = std::conj(column(i));
  }
  fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(c), static_cast<double*>(values.data));
  return Eigen::Map<const Eigen::ArrayXd>(static_cast<double*>(values.data),
                                          static_cast<Eigen::Index>(lattice.grid_points()));
}

Eigen::VectorXcd from_grid(const WaveVectorLattice& lattice, const GridScalar& values) {
  const auto& plans = plans_for(lattice.resolution());
  const std::size_t csize = half_size(lattice);
  FftwBuffer spectrum(csize * sizeof(fftw_complex));
  FftwBuffer input(lattice.grid_points() * sizeof(double));
  auto* r = static_cast<double*>(input.data);
  std::copy(values.data(), values.data() + values.size(), r);
  auto* c = static_cast<Complex*>(spectrum.data);
  fftw_execute_dft_r2c(plans.forward, r, reinterpret_cast<fftw_complex*>(c));

  const double scale = 1.0 / static_cast<double>(lattice.grid_points());
  const auto& offsets = lattice.fft_offsets();
  Eigen::VectorXcd out(lattice.mode_count());
  for (Eigen::Index i = 0; i < lattice.mode_count(); ++i) {
    out(i) = c[offsets[static_cast<std::size_t>(i)]] * scale;
  }
  return out;
}

GridVector to_grid(const SpectralField& u) {
  return {to_grid(u.lattice(), u.coefficients().col(0)), to_grid(u.lattice(), u.coefficients().col(1)),
          to_grid(u.lattice(), u.coefficients().col(2))};
}

}  // namespace nsstat
