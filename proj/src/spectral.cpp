#include "photonkit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "photonkit/errors.hpp"
#include "photonkit/fit.hpp"
#include "photonkit/units.hpp"

namespace photonkit::spectral {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

// Robust noise estimate: 1.4826 * median absolute deviation.
double mad_noise(const std::vector<double>& v, double med) {
    if (v.empty()) return 0.0;
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - med);
    return 1.4826 * median(std::move(dev));
}

double median_spacing(const SpectrumTrace& s) {
    const auto& smp = s.samples();
    std::vector<double> gaps;
    gaps.reserve(smp.size());
    for (std::size_t i = 1; i < smp.size(); ++i)
        gaps.push_back(smp[i].wavelength_nm - smp[i - 1].wavelength_nm);
    return gaps.empty() ? 0.0 : median(std::move(gaps));
}

fit::Model gaussian_peak_model() {
    // params {a, center, sigma, b}
    return [](const std::vector<double>& p, double x, double* grad) {
        const double a = p[0], c = p[1], s = p[2], b = p[3];
        const double d = (x - c) / s;
        const double e = std::exp(-0.5 * d * d);
        if (grad) {
            grad[0] = e;
            grad[1] = a * e * d / s;
            grad[2] = a * e * d * d / s;
            grad[3] = 1.0;
        }
        return a * e + b;
    };
}

}  // namespace

ZplPeak detect_zpl(const SpectrumTrace& s, double lo_nm, double hi_nm) {
    if (s.size() < 5) throw InsufficientDataError("spectrum too short");
    if (lo_nm < s.min_wavelength() || hi_nm > s.max_wavelength())
        throw CoverageError("search range outside the measured spectrum");

    const auto& smp = s.samples();
    std::size_t peak = smp.size();
    double peak_y = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> in_range;
    for (std::size_t i = 0; i < smp.size(); ++i) {
        if (smp[i].wavelength_nm < lo_nm || smp[i].wavelength_nm > hi_nm) continue;
        in_range.push_back(i);
        if (smp[i].intensity > peak_y) {
            peak_y = smp[i].intensity;
            peak = i;
        }
    }
    if (in_range.empty()) throw CoverageError("empty search range");

    const double res = median_spacing(s);
    const double peak_nm = smp[peak].wavelength_nm;

    std::vector<double> off_peak;
    for (std::size_t i : in_range)
        if (std::abs(smp[i].wavelength_nm - peak_nm) > 5.0 * res)
            off_peak.push_back(smp[i].intensity);
    if (off_peak.size() < 5)
        for (std::size_t i : in_range) off_peak.push_back(smp[i].intensity);
    const double baseline = median(off_peak);
    const double noise = mad_noise(off_peak, baseline);
    const double amplitude = peak_y - baseline;
    if (!(amplitude > 0) || amplitude <= 3.0 * noise)
        throw NoPeakError("no peak above 3x the baseline noise");

    // Refine the center over +/- 3 resolution elements.
    std::vector<fit::DataPoint> local;
    for (std::size_t i : in_range)
        if (std::abs(smp[i].wavelength_nm - peak_nm) <= 3.0 * res + 1e-12)
            local.push_back({smp[i].wavelength_nm, smp[i].intensity, 1.0});

    ZplPeak out{peak_nm, 2.354820045 * res, amplitude};
    if (local.size() >= 5) {
        try {
            auto r = fit::solve_least_squares(
                gaussian_peak_model(), local,
                {amplitude, peak_nm, std::max(res, 1e-6), baseline},
                {"a", "c", "sigma", "b"});
            const double c = r.value("c");
            if (std::abs(c - peak_nm) <= 3.0 * res) {
                out.wavelength_nm = c;
                out.fwhm_nm = 2.354820045 * std::abs(r.value("sigma"));
                out.amplitude = r.value("a");
            }
        } catch (const Error&) {
            // keep the raw argmax estimate
        }
    }
    return out;
}

ElineResult detect_e_line(const SpectrumTrace& s, double zpl_energy_mev) {
    const double target = zpl_energy_mev - kElineShift_meV;
    if (!(target > kElineWindow_meV))
        throw DomainError("ZPL energy too small for an E-line window");
    const double w_lo = energy_to_wavelength_nm(target + kElineWindow_meV);
    const double w_hi = energy_to_wavelength_nm(target - kElineWindow_meV);
    if (w_lo < s.min_wavelength() || w_hi > s.max_wavelength())
        throw CoverageError("E-line window not covered by the spectrum");

    const auto& smp = s.samples();
    double peak_y = -std::numeric_limits<double>::infinity();
    double peak_nm = 0;
    std::vector<double> flank;
    const double width = w_hi - w_lo;
    for (const auto& p : smp) {
        if (p.wavelength_nm >= w_lo && p.wavelength_nm <= w_hi) {
            if (p.intensity > peak_y) {
                peak_y = p.intensity;
                peak_nm = p.wavelength_nm;
            }
        } else if (p.wavelength_nm >= w_lo - 2.0 * width &&
                   p.wavelength_nm <= w_hi + 2.0 * width) {
            flank.push_back(p.intensity);
        }
    }
    if (!(peak_y > -std::numeric_limits<double>::infinity()))
        throw CoverageError("no samples inside the E-line window");

    const double baseline = median(flank);
    const double noise = mad_noise(flank, baseline);
    double snr;
    if (noise > 0) {
        snr = (peak_y - baseline) / noise;
    } else {
        snr = peak_y > baseline ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return {snr >= kElineSnrThreshold, peak_nm, snr};
}

SpectralFeatures analyze_spectrum(const SpectrumTrace& s, double zpl_lo_nm,
                                  double zpl_hi_nm) {
    const ZplPeak zpl = detect_zpl(s, zpl_lo_nm, zpl_hi_nm);
    SpectralFeatures f{};
    f.zpl_wavelength_nm = zpl.wavelength_nm;
    f.zpl_energy_mev = wavelength_to_energy_mev(zpl.wavelength_nm);
    f.zpl_fwhm_nm = zpl.fwhm_nm;
    f.eline_present = false;
    f.eline_wavelength_nm = 0;
    f.eline_snr = 0;
    try {
        const ElineResult e = detect_e_line(s, f.zpl_energy_mev);
        f.eline_present = e.present;
        f.eline_wavelength_nm = e.wavelength_nm;
        f.eline_snr = e.snr;
        f.eline_measured = true;
    } catch (const CoverageError&) {
        f.eline_measured = false;
    }

    // Best-effort phonon sideband displacement; not used for classification.
    const double lo_e = f.zpl_energy_mev - 25.0;
    const double hi_e = f.zpl_energy_mev - 8.0;
    double best_y = 0, best_e = 0;
    for (const auto& p : s.samples()) {
        const double e = wavelength_to_energy_mev(p.wavelength_nm);
        if (e >= lo_e && e <= hi_e && p.intensity > best_y) {
            best_y = p.intensity;
            best_e = e;
        }
    }
    if (best_y > 0) f.sideband_energy_mev = f.zpl_energy_mev - best_e;
    return f;
}

ZplPopulationStats zpl_population_stats(const std::vector<double>& zpl_nm) {
    if (zpl_nm.size() < 2)
        throw InsufficientDataError("population statistics need n >= 2");
    double sum = 0, mn = zpl_nm[0], mx = zpl_nm[0];
    for (double w : zpl_nm) {
        sum += w;
        mn = std::min(mn, w);
        mx = std::max(mx, w);
    }
    const double mean = sum / static_cast<double>(zpl_nm.size());
    double ss = 0;
    for (double w : zpl_nm) ss += (w - mean) * (w - mean);
    const double sd = std::sqrt(ss / static_cast<double>(zpl_nm.size() - 1));
    return {zpl_nm.size(), mean, sd, mn, mx};
}

}  // namespace photonkit::spectral
