#pragma once

#include "nsstat/spectral_field.hpp"

namespace nsstat {

/*
 * B(u, v) = P[(u . grad) v], Leray-projected and truncated to the active set.
 * Evaluated pseudo-spectrally in divergence form d_j(u_j v_i), which is exact
 * (alias-free) for fields on the 2/3-rule active cube.
 */
SpectralField bilinear_B(const SpectralField& u, const SpectralField& v);

/// B(u, u) through the six symmetric products only.
SpectralField advection(const SpectralField& u);

/// b(u, v, w) = integral of (u . grad) v . w over the box.
double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w);

}  // namespace nsstat
