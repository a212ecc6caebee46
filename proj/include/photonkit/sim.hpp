#pragma once

#include <cstdint>
#include <vector>

#include "photonkit/types.hpp"

namespace photonkit::sim {

enum class EmitterKind { G, Gstar, Custom };

// Ground-truth physical parameters of a simulated color center.
struct EmitterModel {
    EmitterKind kind = EmitterKind::Custom;
    double lifetime_tau_ns = 10.0;
    double quantum_efficiency = 1.0;        // (0, 1]
    double sat_power_uW = 1.0;              // Psat
    double sat_intensity_kcps = 10.0;       // Isat (detected, at saturation)
    double polar_visibility = 1.0;          // V in [0, 1]
    double polar_axis_deg = 0.0;            // phi0
    double zpl_wavelength_nm = 1279.0;
    double zpl_fwhm_nm = 0.5;
    double eline_relative_intensity = 0.0;  // relative to the ZPL amplitude
    double sideband_energy_mev = 14.5;
    double sideband_relative_intensity = 0.3;
    double background_cps = 0.0;

    static EmitterModel g_center();
    static EmitterModel gstar_center();
    void validate() const;
};

struct SimConfig {
    std::uint64_t seed = 1;
    double duration_s = 1.0;            // cw stream length
    std::uint64_t pulse_count = 0;      // pulsed-mode excitation pulses
    double pulse_period_ns = 50.0;
    double excitation_power_uW = 1.0;
    double detector_jitter_sigma_ps = 0.0;
    double timing_resolution_ps = 1.0;
    double decay_bin_ns = 0.1;          // decay histogram bin width
    double dwell_s = 1.0;               // integration time per scan point
    bool shot_noise = true;
    // Per-decay (cw) or per-pulse detection probability; negative means
    // "derive from the model" as Isat * tau.
    double detection_probability = -1.0;
};

// Detected-rate law Isat * P / (P + Psat), in kcounts/s, background excluded.
double saturation_rate_kcps(const EmitterModel& m, double power_uW);

// Polarization diagram shape 1 - V + V*cos^2(angle - phi0).
double polarization_shape(double visibility, double phi0_deg, double angle_deg);

// Two-level cw dynamics with pump rate k(P) = P/(Psat*tau) and decay rate
// 1/tau; detected photons split 50/50 over two channels, Poisson background
// added on both.
TimeTagStream simulate_cw_stream(const EmitterModel& m, const SimConfig& c);

DecayHistogram simulate_pulsed_decay(const EmitterModel& m, const SimConfig& c);

PolarizationScan simulate_polarization_scan(const EmitterModel& m,
                                            const std::vector<double>& angles_deg,
                                            const SimConfig& c);

SaturationSeries simulate_saturation_series(const EmitterModel& m,
                                            const std::vector<double>& powers_uW,
                                            const SimConfig& c);

SpectrumTrace simulate_spectrum(const EmitterModel& m, double lo_nm, double hi_nm,
                                double resolution_nm, const SimConfig& c);

}  // namespace photonkit::sim
