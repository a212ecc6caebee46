#pragma once

#include <optional>
#include <vector>

#include "photonkit/types.hpp"

namespace photonkit::spectral {

struct ZplPeak {
    double wavelength_nm;
    double fwhm_nm;
    double amplitude;  // above local baseline
};

struct ElineResult {
    bool present;
    double wavelength_nm;  // meaningful only when present
    double snr;
};

struct SpectralFeatures {
    double zpl_wavelength_nm;
    double zpl_energy_mev;
    double zpl_fwhm_nm;
    bool eline_measured = false;  // false when the window fell outside the trace
    bool eline_present = false;
    double eline_wavelength_nm = 0;  // when present
    double eline_snr = 0;
    std::optional<double> sideband_energy_mev;
};

struct ZplPopulationStats {
    std::size_t n;
    double mean_nm;
    double std_dev_nm;  // n-1 denominator
    double min_nm;
    double max_nm;
};

// Highest peak inside the search range, refined by a local Gaussian fit over
// +/- 3 resolution elements. Throws NoPeakError when nothing stands 3x above
// the baseline noise.
ZplPeak detect_zpl(const SpectrumTrace& s, double lo_nm, double hi_nm);

// Searches a +/- 2 meV window around zpl_energy - 71.9 meV. The window is
// defined in energy, then mapped to wavelength. Throws CoverageError when
// the trace does not cover the window.
ElineResult detect_e_line(const SpectrumTrace& s, double zpl_energy_mev);

SpectralFeatures analyze_spectrum(const SpectrumTrace& s, double zpl_lo_nm,
                                  double zpl_hi_nm);

ZplPopulationStats zpl_population_stats(const std::vector<double>& zpl_nm);

inline constexpr double kElineWindow_meV = 2.0;
inline constexpr double kElineSnrThreshold = 3.0;

}  // namespace photonkit::spectral
