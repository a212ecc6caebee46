#pragma once

#include "photonkit/errors.hpp"

namespace photonkit {

// hc in meV*nm. Reproduces the 969.45 meV <-> 1278.9 nm pairing to <0.1 nm.
inline constexpr double kHC_meV_nm = 1'239'841.98;

inline double wavelength_to_energy_mev(double wavelength_nm) {
    if (!(wavelength_nm > 0.0))
        throw DomainError("wavelength must be positive");
    return kHC_meV_nm / wavelength_nm;
}

inline double energy_to_wavelength_nm(double energy_mev) {
    if (!(energy_mev > 0.0))
        throw DomainError("photon energy must be positive");
    return kHC_meV_nm / energy_mev;
}

// Local vibration mode displacement of the G-center E-line below its ZPL.
inline constexpr double kElineShift_meV = 71.9;

}  // namespace photonkit
