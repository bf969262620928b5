#pragma once

#include <complex>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "stormdiag/grid.hpp"

namespace stormdiag::spectral {

inline constexpr int kDefaultTruncation = 106;

/// Triangular set of complex spherical-harmonic coefficients c(l, m),
/// 0 <= m <= l <= lmax, for a real field (c(l, -m) = (-1)^m conj c(l, m)).
///
/// Harmonics are orthonormal over the unit sphere,
///   Y(l, m) = Pbar(l, m)(sin lat) exp(i m lon),  integral |Y|^2 dOmega = 1,
/// without the Condon-Shortley phase. Storage is m-major: all l for m = 0,
/// then all l for m = 1, and so on.
struct SpectralField {
    int lmax = 0;
    std::vector<std::complex<double>> coeffs;
    std::string norm = "orthonormal";

    explicit SpectralField(int lmax = 0);

    static std::size_t count(int lmax) {
        return static_cast<std::size_t>(lmax + 1) * (lmax + 2) / 2;
    }
    std::size_t index(int l, int m) const {
        return static_cast<std::size_t>(m) * (2 * lmax + 3 - m) / 2 + (l - m);
    }
    std::complex<double>& operator()(int l, int m) { return coeffs[index(l, m)]; }
    const std::complex<double>& operator()(int l, int m) const { return coeffs[index(l, m)]; }

    /// Sum of |c|^2 counting each m > 0 twice (the +-m pair).
    double energy() const;
};

/// Forward transform. Requires a global grid (is_global()), no NaN,
/// nlat >= 2 (lmax + 1) and nlon > 2 lmax. Quadrature is Clenshaw-Curtis for
/// pole-inclusive grids and Fejer's first rule for half-offset grids, exact
/// for band-limited integrands of degree <= nlat - 2.
SpectralField analyze(const Field& f, int lmax);

/// Inverse transform onto a global target grid. The result carries no
/// variable/level/time metadata.
Field synthesize(const SpectralField& s, const GridSpec& target);

/// synthesize(analyze(f, lmax), f.grid) with f's metadata preserved.
Field truncate(const Field& f, int lmax = kDefaultTruncation);

/// Per-row quadrature weights w(i) such that
///   integral g dOmega ~= sum_i w(i) * (2 pi / nlon) * sum_j g(i, j).
/// The weights sum to 2.
std::vector<double> quadrature_weights(const GridSpec& g);

/// Quadrature-weighted global mean.
double area_mean(const Field& f);

/// Quadrature estimate of integral f^2 dOmega.
double grid_energy(const Field& f);

/// Debug dump: one "l,m,abs" line per coefficient.
void write_coefficient_csv(std::ostream& out, const SpectralField& s);

/// Fills NaN cells on pole rows from the nearest non-NaN row in the same
/// column. Throws if NaN appears anywhere else.
Field fill_pole_rows(const Field& f);

}  // namespace stormdiag::spectral
