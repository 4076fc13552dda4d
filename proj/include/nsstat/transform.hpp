#pragma once

#include "nsstat/spectral_field.hpp"

#include <array>

namespace nsstat {

/// Real samples on the n^3 grid x_j = j L / n, row-major with x_1 slowest.
using GridScalar = Eigen::ArrayXd;
using GridVector = std::array<GridScalar, 3>;

/// Evaluates one complex coefficient column (per stored mode) on the grid.
GridScalar to_grid(const WaveVectorLattice& lattice, const Eigen::Ref<const Eigen::VectorXcd>& column);
/// Grid samples -> active-mode coefficients (everything outside the active cube is dropped).
Eigen::VectorXcd from_grid(const WaveVectorLattice& lattice, const GridScalar& values);

GridVector to_grid(const SpectralField& u);

}  // namespace nsstat
