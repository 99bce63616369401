#pragma once

// Physical constants (CODATA 2018), SI units throughout.
//
// Every quantity in the library is SI: metres, kilograms, seconds, joules,
// rad/s, and C*m^2/V for polarizabilities. The smallest magnitudes that
// occur (C4 ~ 1e-55 J m^4, p^6 ~ 1e-176) are far from the double-precision
// underflow limit, so no internal rescaling is performed.

#include <numbers>

namespace qreflect::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double h = 2.0 * pi * hbar;           // J s
inline constexpr double k_B = 1.380649e-23;            // J/K
inline constexpr double c = 299792458.0;               // m/s
inline constexpr double eps0 = 8.8541878128e-12;       // F/m
inline constexpr double mu0 = 1.25663706212e-6;        // N/A^2
inline constexpr double amu = 1.66053906660e-27;       // kg
inline constexpr double atomic_polarizability = 1.64877727436e-41;  // C m^2/V per a.u.

/// Argon atomic weight times amu, rounded as used for the species shortcut.
inline constexpr double argon_mass = 6.6335e-26;       // kg

}  // namespace qreflect::constants
