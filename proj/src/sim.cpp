#include "photonkit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "photonkit/errors.hpp"
#include "photonkit/units.hpp"

namespace photonkit::sim {

namespace {

constexpr double kDeg2Rad = M_PI / 180.0;
constexpr double kSpectrumZplAmplitude = 1000.0;  // counts
constexpr double kSidebandFwhm_meV = 10.0;

double gaussian(double x, double center, double fwhm) {
    const double sigma = fwhm / 2.354820045;
    const double d = (x - center) / sigma;
    return std::exp(-0.5 * d * d);
}

std::int64_t quantize_ps(double t_ns, double resolution_ps) {
    const double t_ps = t_ns * 1e3;
    if (resolution_ps <= 1.0) return std::llround(t_ps);
    return std::llround(t_ps / resolution_ps) * static_cast<std::int64_t>(resolution_ps);
}

double derived_detection_probability(const EmitterModel& m) {
    return std::min(1.0, m.sat_intensity_kcps * 1e3 * m.lifetime_tau_ns * 1e-9);
}

}  // namespace

EmitterModel EmitterModel::g_center() {
    EmitterModel m;
    m.kind = EmitterKind::G;
    m.lifetime_tau_ns = 4.9;
    m.quantum_efficiency = 0.01;
    m.sat_power_uW = 1.1;
    m.sat_intensity_kcps = 7.9;
    m.polar_visibility = 0.62;
    m.polar_axis_deg = 0.0;
    m.zpl_wavelength_nm = 1279.0;
    m.zpl_fwhm_nm = 0.5;
    m.eline_relative_intensity = 0.1;
    m.sideband_energy_mev = 14.5;
    m.sideband_relative_intensity = 0.3;
    return m;
}

EmitterModel EmitterModel::gstar_center() {
    EmitterModel m;
    m.kind = EmitterKind::Gstar;
    m.lifetime_tau_ns = 33.4;
    m.quantum_efficiency = 0.5;
    m.sat_power_uW = 12.0;
    m.sat_intensity_kcps = 68.0;
    m.polar_visibility = 0.90;
    m.polar_axis_deg = 37.0;
    m.zpl_wavelength_nm = 1273.0;
    m.zpl_fwhm_nm = 1.0;
    m.eline_relative_intensity = 0.0;
    m.sideband_energy_mev = 14.5;
    m.sideband_relative_intensity = 0.3;
    return m;
}

void EmitterModel::validate() const {
    if (!(lifetime_tau_ns > 0)) throw DomainError("lifetime must be positive");
    if (!(quantum_efficiency > 0 && quantum_efficiency <= 1))
        throw DomainError("quantum efficiency must be in (0, 1]");
    if (!(sat_power_uW > 0)) throw DomainError("Psat must be positive");
    if (sat_intensity_kcps < 0) throw DomainError("Isat must be >= 0");
    if (polar_visibility < 0 || polar_visibility > 1)
        throw DomainError("visibility must be in [0, 1]");
    if (!(zpl_wavelength_nm > 0)) throw DomainError("ZPL wavelength must be positive");
    if (!(zpl_fwhm_nm > 0)) throw DomainError("ZPL fwhm must be positive");
    if (eline_relative_intensity < 0 || sideband_relative_intensity < 0)
        throw DomainError("relative intensities must be >= 0");
    if (background_cps < 0) throw DomainError("background rate must be >= 0");
    if (kind == EmitterKind::G && !(eline_relative_intensity > 0))
        throw DomainError("G centers must carry an E-line");
    if (kind == EmitterKind::Gstar && eline_relative_intensity != 0)
        throw DomainError("Gstar centers have no E-line");
}

double saturation_rate_kcps(const EmitterModel& m, double power_uW) {
    if (!(power_uW > 0)) throw DomainError("excitation power must be positive");
    return m.sat_intensity_kcps * power_uW / (power_uW + m.sat_power_uW);
}

double polarization_shape(double visibility, double phi0_deg, double angle_deg) {
    const double c = std::cos((angle_deg - phi0_deg) * kDeg2Rad);
    return 1.0 - visibility + visibility * c * c;
}

TimeTagStream simulate_cw_stream(const EmitterModel& m, const SimConfig& c) {
    m.validate();
    if (!(c.duration_s > 0)) throw ConfigError("cw stream needs a positive duration");
    if (!(c.excitation_power_uW > 0))
        throw DomainError("excitation power must be positive");

    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, 1.0);

    const double duration_ns = c.duration_s * 1e9;
    const std::int64_t duration_ps = std::llround(c.duration_s * 1e12);
    const double gamma = 1.0 / m.lifetime_tau_ns;  // per ns
    const double pump = c.excitation_power_uW / (m.sat_power_uW * m.lifetime_tau_ns);
    const double p_det = c.detection_probability >= 0
                             ? std::min(1.0, c.detection_probability)
                             : derived_detection_probability(m);
    const double jitter_ns = c.detector_jitter_sigma_ps * 1e-3;

    std::vector<TimeTag> tags;
    if (p_det > 0 && pump > 0 && m.sat_intensity_kcps >= 0) {
        std::exponential_distribution<double> wait_ground(pump);
        std::exponential_distribution<double> wait_excited(gamma);
        const double mean_rate_ns = pump * gamma / (pump + gamma) * p_det;
        tags.reserve(static_cast<std::size_t>(mean_rate_ns * duration_ns * 1.1) + 64);
        double t = 0.0;
        while (true) {
            t += wait_ground(rng);
            t += wait_excited(rng);
            if (t >= duration_ns) break;
            if (uni(rng) >= p_det) continue;
            double td = t;
            if (jitter_ns > 0) td += jitter_ns * jitter(rng);
            const std::int64_t tp = quantize_ps(td, c.timing_resolution_ps);
            if (tp < 0 || tp > duration_ps) continue;
            tags.push_back({tp, static_cast<std::uint8_t>(uni(rng) < 0.5 ? 0 : 1)});
        }
    }

    if (m.background_cps > 0) {
        std::exponential_distribution<double> gap(m.background_cps * 1e-9);  // per ns
        double t = gap(rng);
        while (t < duration_ns) {
            const std::int64_t tp = quantize_ps(t, c.timing_resolution_ps);
            if (tp >= 0 && tp <= duration_ps)
                tags.push_back({tp, static_cast<std::uint8_t>(uni(rng) < 0.5 ? 0 : 1)});
            t += gap(rng);
        }
    }

    std::stable_sort(tags.begin(), tags.end(),
                     [](const TimeTag& a, const TimeTag& b) {
                         return a.time_ps < b.time_ps;
                     });
    return TimeTagStream(std::move(tags), duration_ps, 2);
}

DecayHistogram simulate_pulsed_decay(const EmitterModel& m, const SimConfig& c) {
    m.validate();
    if (c.pulse_count == 0) throw ConfigError("pulsed mode needs pulse_count > 0");
    if (!(c.pulse_period_ns > 5.0 * m.lifetime_tau_ns))
        throw ConfigError("pulse period must exceed 5x the lifetime");
    if (!(c.decay_bin_ns > 0)) throw ConfigError("decay bin width must be positive");

    const std::size_t nbins = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(c.pulse_period_ns / c.decay_bin_ns + 0.5)));
    const double width = c.pulse_period_ns / static_cast<double>(nbins);
    std::vector<double> edges(nbins + 1);
    for (std::size_t i = 0; i <= nbins; ++i)
        edges[i] = width * static_cast<double>(i);
    std::vector<std::uint64_t> counts(nbins, 0);

    const double p_det = c.detection_probability >= 0
                             ? std::min(1.0, c.detection_probability)
                             : derived_detection_probability(m);

    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::exponential_distribution<double> decay(1.0 / m.lifetime_tau_ns);
    std::normal_distribution<double> jitter(0.0, c.detector_jitter_sigma_ps * 1e-3);
    const bool has_jitter = c.detector_jitter_sigma_ps > 0;

    for (std::uint64_t p = 0; p < c.pulse_count; ++p) {
        if (p_det < 1.0 && uni(rng) >= p_det) continue;
        if (p_det == 0.0) continue;
        double d = decay(rng);
        if (has_jitter) d += jitter(rng);
        d = std::fmod(d, c.pulse_period_ns);
        if (d < 0) d += c.pulse_period_ns;
        auto bin = static_cast<std::size_t>(d / width);
        if (bin >= nbins) bin = nbins - 1;
        ++counts[bin];
    }
    return DecayHistogram(std::move(edges), std::move(counts), c.pulse_period_ns);
}

PolarizationScan simulate_polarization_scan(const EmitterModel& m,
                                            const std::vector<double>& angles_deg,
                                            const SimConfig& c) {
    m.validate();
    if (angles_deg.empty()) throw DomainError("polarization scan needs angles");
    std::mt19937_64 rng(c.seed);

    const double rate_cps =
        saturation_rate_kcps(m, c.excitation_power_uW) * 1e3;
    std::vector<PolarizationPoint> pts;
    pts.reserve(angles_deg.size());
    for (double a : angles_deg) {
        const double mean =
            rate_cps * polarization_shape(m.polar_visibility, m.polar_axis_deg, a) +
            m.background_cps;
        double intensity = mean;
        if (c.shot_noise) {
            std::poisson_distribution<long long> pois(mean * c.dwell_s);
            intensity = static_cast<double>(pois(rng)) / c.dwell_s;
        }
        pts.push_back({a, intensity});
    }
    return PolarizationScan(std::move(pts));
}

SaturationSeries simulate_saturation_series(const EmitterModel& m,
                                            const std::vector<double>& powers_uW,
                                            const SimConfig& c) {
    m.validate();
    std::mt19937_64 rng(c.seed);
    std::vector<SaturationPoint> pts;
    pts.reserve(powers_uW.size());
    for (double p : powers_uW) {
        const double mean_kcps =
            saturation_rate_kcps(m, p) + m.background_cps * 1e-3;
        double intensity = mean_kcps;
        if (c.shot_noise) {
            std::poisson_distribution<long long> pois(mean_kcps * 1e3 * c.dwell_s);
            intensity = static_cast<double>(pois(rng)) / (1e3 * c.dwell_s);
        }
        pts.push_back({p, intensity});
    }
    return SaturationSeries(std::move(pts));
}

SpectrumTrace simulate_spectrum(const EmitterModel& m, double lo_nm, double hi_nm,
                                double resolution_nm, const SimConfig& c) {
    m.validate();
    if (!(resolution_nm > 0)) throw DomainError("resolution must be positive");
    if (!(lo_nm < m.zpl_wavelength_nm && m.zpl_wavelength_nm < hi_nm))
        throw DomainError("spectral range must cover the ZPL");

    const double zpl_energy = wavelength_to_energy_mev(m.zpl_wavelength_nm);
    const double eline_nm = energy_to_wavelength_nm(zpl_energy - kElineShift_meV);
    const double sideband_center_mev = zpl_energy - m.sideband_energy_mev;

    std::mt19937_64 rng(c.seed);
    std::vector<SpectrumSample> samples;
    for (double w = lo_nm; w <= hi_nm + 1e-12; w += resolution_nm) {
        const double e = wavelength_to_energy_mev(w);
        double y = kSpectrumZplAmplitude * gaussian(w, m.zpl_wavelength_nm, m.zpl_fwhm_nm);
        y += kSpectrumZplAmplitude * m.eline_relative_intensity *
             gaussian(w, eline_nm, m.zpl_fwhm_nm);
        y += kSpectrumZplAmplitude * m.sideband_relative_intensity *
             gaussian(e, sideband_center_mev, kSidebandFwhm_meV);
        if (c.shot_noise) {
            std::poisson_distribution<long long> pois(y);
            y = static_cast<double>(pois(rng));
        }
        samples.push_back({w, y});
    }
    return SpectrumTrace(std::move(samples));
}

}  // namespace photonkit::sim
