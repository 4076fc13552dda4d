#include "nsstat/nonlinear.hpp"

#include "nsstat/transform.hpp"

namespace nsstat {
namespace {

// Given transformed products (u_j v_i)^ for i, j, returns i k'_j (u_j v_i)^ projected.
SpectralField assemble(const WaveVectorLattice& lattice, const LatticePtr& ptr,
                       const std::array<std::array<Eigen::VectorXcd, 3>, 3>& product_hat) {
  const RealModes& k = lattice.wavevectors();
  const Complex I(0.0, 1.0);
  ModeMatrix out = ModeMatrix::Zero(lattice.mode_count(), 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.col(i).array() += I * k.col(j).cast<Complex>().array() * product_hat[i][j].array();
    }
  }
  leray_project_in_place(lattice, out);
  return SpectralField(ptr, std::move(out));
}

}  // namespace

SpectralField bilinear_B(const SpectralField& u, const SpectralField& v) {
  require_same_lattice(u, v);
  const auto& lattice = u.lattice();
  const GridVector ug = to_grid(u);
  const GridVector vg = to_grid(v);
  std::array<std::array<Eigen::VectorXcd, 3>, 3> hat;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) hat[i][j] = from_grid(lattice, ug[j] * vg[i]);
  return assemble(lattice, u.lattice_ptr(), hat);
}

SpectralField advection(const SpectralField& u) {
  const auto& lattice = u.lattice();
  const GridVector g = to_grid(u);
  std::array<std::array<Eigen::VectorXcd, 3>, 3> hat;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      hat[i][j] = from_grid(lattice, g[i] * g[j]);
      if (j != i) hat[j][i] = hat[i][j];
    }
  }
  return assemble(lattice, u.lattice_ptr(), hat);
}

double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
  require_same_lattice(u, w);
  return inner(bilinear_B(u, v), w);
}

}  // namespace nsstat
