#pragma once

#include "nsstat/spectral_field.hpp"

#include <random>

namespace nsstat {

using Rng = std::mt19937_64;

/*
 * Random divergence-free field with Gaussian coefficients whose amplitude
 * decays like lambda(k)^(-slope/2) and vanishes beyond max_wavenumber
 * (max |k_i|; 0 means the whole active cube). Not normalized.
 */
SpectralField random_field(const LatticePtr& lattice, Rng& rng, double slope = 1.0, int max_wavenumber = 0);

/// Random field rescaled to the given L2 norm.
SpectralField random_field_with_norm(const LatticePtr& lattice, Rng& rng, double l2, double slope = 1.0,
                                     int max_wavenumber = 0);

/// Divergence-free single Fourier pair at k with a polarization orthogonal to k.
SpectralField single_mode(const LatticePtr& lattice, int k1, int k2, int k3, const Eigen::Vector3cd& amplitude);

/// u = (sin x_1 cos x_2, -cos x_1 sin x_2, 0) scaled by amplitude (requires 2 pi periods in x_1, x_2).
SpectralField taylor_green_field(const LatticePtr& lattice, double amplitude);

/// Arnold-Beltrami-Childress field (A sin x_3 + C cos x_2, B sin x_1 + A cos x_3, C sin x_2 + B cos x_1).
SpectralField abc_field(const LatticePtr& lattice, double a, double b, double c);

}  // namespace nsstat
