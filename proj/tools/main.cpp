// photonkit command-line tool: simulate parameterized color centers, analyze
// time-tag / scan data, classify emitters and evaluate the quantum-efficiency
// bound.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "photonkit/classify.hpp"
#include "photonkit/correlator.hpp"
#include "photonkit/errors.hpp"
#include "photonkit/fit.hpp"
#include "photonkit/io.hpp"
#include "photonkit/sim.hpp"
#include "photonkit/spectral.hpp"
#include "photonkit/units.hpp"

namespace fs = std::filesystem;
using namespace photonkit;

namespace {

// Collects key=value output, mirrors it to stdout and optionally to a file.
class Output {
public:
    void set_path(const std::string& p) { path_ = p; }
    template <typename T>
    void kv(const std::string& key, const T& value) {
        std::ostringstream ss;
        ss << key << "=" << value;
        lines_.push_back(ss.str());
    }
    void kv_double(const std::string& key, double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        kv(key, buf);
    }
    void flush() {
        for (const auto& l : lines_) std::cout << l << "\n";
        if (!path_.empty()) {
            std::ofstream out(path_);
            for (const auto& l : lines_) out << l << "\n";
        }
    }

private:
    std::vector<std::string> lines_;
    std::string path_;
};

sim::EmitterModel model_for_kind(const std::string& kind) {
    if (kind == "g") return sim::EmitterModel::g_center();
    if (kind == "gstar") return sim::EmitterModel::gstar_center();
    if (kind == "custom") return sim::EmitterModel{};
    throw ConfigError("unknown emitter kind: " + kind);
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return v;
}

fs::path resolve(const fs::path& p, const char* bundle_file) {
    return fs::is_directory(p) ? p / bundle_file : p;
}

void write_overlay_csv(const fs::path& path, const std::string& x_unit,
                       const std::string& y_unit,
                       const std::vector<std::array<double, 3>>& rows) {
    std::ofstream out(path);
    out << "overlay," << x_unit << "," << y_unit << "\n";
    for (const auto& r : rows) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", r[0], r[1], r[2]);
        out << buf;
    }
}

void write_overlay_svg(const fs::path& path,
                       const std::vector<std::array<double, 3>>& rows,
                       const std::string& title) {
    if (rows.empty()) return;
    double xmin = rows[0][0], xmax = rows[0][0], ymin = 0, ymax = 0;
    for (const auto& r : rows) {
        xmin = std::min(xmin, r[0]);
        xmax = std::max(xmax, r[0]);
        ymax = std::max({ymax, r[1], r[2]});
    }
    if (xmax == xmin || ymax == ymin) return;
    const double w = 640, h = 400, margin = 40;
    auto X = [&](double x) {
        return margin + (x - xmin) / (xmax - xmin) * (w - 2 * margin);
    };
    auto Y = [&](double y) {
        return h - margin - (y - ymin) / (ymax - ymin) * (h - 2 * margin);
    };
    std::ofstream out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
        << "' height='" << h << "'>\n<text x='" << margin << "' y='20'>"
        << title << "</text>\n";
    out << "<polyline fill='none' stroke='black' points='";
    for (const auto& r : rows) out << X(r[0]) << "," << Y(r[2]) << " ";
    out << "'/>\n";
    for (const auto& r : rows)
        out << "<circle cx='" << X(r[0]) << "' cy='" << Y(r[1])
            << "' r='2' fill='steelblue'/>\n";
    out << "</svg>\n";
}

struct G2Options {
    double window_ns = 50.0;
    double bin_width_ns = 1.0;
    int avg_bins = 3;
    int threads = 1;
};

correlator::G2Zero run_g2(const TimeTagStream& s, const G2Options& opt) {
    auto h = correlator::correlate(s, opt.window_ns, opt.bin_width_ns, 0, 1,
                                   opt.threads);
    return correlator::g2_at_zero(h, opt.avg_bins);
}

int cmd_simulate(const std::string& kind, sim::EmitterModel m, sim::SimConfig c,
                 std::uint64_t photons, const std::string& out_dir,
                 const std::string& emitter_id, Output& out) {
    if (out_dir.empty()) throw ConfigError("simulate needs --out");

    io::MeasurementBundle b;
    b.meta.emitter_id = emitter_id.empty() ? kind + "-emitter" : emitter_id;
    b.meta.layer_thickness_nm = kind == "g" ? 60.0 : 220.0;

    // cw stream for g2
    sim::SimConfig cw = c;
    b.stream = sim::simulate_cw_stream(m, cw);

    // pulsed decay
    sim::SimConfig pulsed = c;
    pulsed.seed = c.seed + 1;
    if (pulsed.pulse_period_ns <= 5.0 * m.lifetime_tau_ns)
        pulsed.pulse_period_ns = 8.0 * m.lifetime_tau_ns;
    pulsed.detection_probability = 1.0;
    pulsed.pulse_count = photons;
    pulsed.decay_bin_ns = pulsed.pulse_period_ns / 1000.0;
    b.decay = sim::simulate_pulsed_decay(m, pulsed);

    // polarization scan, 10 degree steps
    std::vector<double> angles;
    for (int a = 0; a < 360; a += 10) angles.push_back(a);
    sim::SimConfig polar = c;
    polar.seed = c.seed + 2;
    b.polarization = sim::simulate_polarization_scan(m, angles, polar);

    // saturation series over two decades around Psat
    sim::SimConfig satc = c;
    satc.seed = c.seed + 3;
    b.saturation = sim::simulate_saturation_series(
        m, logspace(0.1 * m.sat_power_uW, 10.0 * m.sat_power_uW, 12), satc);

    sim::SimConfig spec = c;
    spec.seed = c.seed + 4;
    b.spectrum = sim::simulate_spectrum(m, m.zpl_wavelength_nm - 45.0,
                                        m.zpl_wavelength_nm + 115.0, 0.2, spec);

    io::write_bundle(out_dir, b);
    out.kv("bundle", out_dir);
    out.kv("emitter_id", b.meta.emitter_id);
    out.kv("kind", kind);
    out.kv("tags", b.stream->size());
    out.kv("decay_counts", b.decay->total_counts());
    out.flush();
    return 0;
}

classify::EmitterFeatures features_from_bundle(const io::MeasurementBundle& b,
                                               const G2Options& g2opt,
                                               std::vector<std::string>& notes) {
    classify::EmitterFeatures f;

    if (b.stream) {
        f.g2_zero = run_g2(*b.stream, g2opt);
    } else {
        f.g2_zero = {0.0, 0.0};
        notes.push_back("no time-tag stream; antibunching gate skipped");
    }

    if (b.spectrum) {
        const auto sf = spectral::analyze_spectrum(
            *b.spectrum, b.spectrum->min_wavelength(), b.spectrum->max_wavelength());
        if (!sf.eline_measured)
            f.eline = classify::Tristate::unmeasured;
        else
            f.eline = sf.eline_present ? classify::Tristate::present
                                       : classify::Tristate::absent;
    } else {
        f.eline = classify::Tristate::unmeasured;
        notes.push_back("no spectrum; E-line criterion unmeasured");
    }

    if (!b.decay)
        throw InsufficientDataError("classification needs a decay histogram");
    const auto decay_fit = fit::fit_exponential_decay(*b.decay);
    f.lifetime_tau_ns = decay_fit.value("tau");
    f.lifetime_sigma_ns = decay_fit.sigma("tau");

    if (!b.polarization)
        throw InsufficientDataError("classification needs a polarization scan");
    const auto polar_fit = fit::fit_polarization(*b.polarization);
    f.polar_visibility = polar_fit.value("V");
    f.polar_visibility_sigma = polar_fit.sigma("V");
    f.polar_axis_phi0_deg =
        polar_fit.value("phi0") - b.meta.axis_reference_deg;
    f.polar_axis_undefined = polar_fit.phi0_undefined;

    if (b.saturation) {
        const auto sat_fit = fit::fit_saturation(*b.saturation);
        f.sat_intensity_kcps = sat_fit.value("Isat");
        f.sat_power_uW = sat_fit.value("Psat");
    }
    return f;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-emitter photophysics toolkit"};
    app.require_subcommand(1);

    Output out;
    std::string out_path;
    std::uint64_t seed = 1;

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic measurement bundle");
    std::string kind = "g", emitter_id;
    double power = -1, duration_s = 2.0, period_ns = -1;
    std::uint64_t photons = 200000;
    struct Override {
        std::optional<double> tau, qe, isat, psat, visibility, phi0, zpl,
            zpl_fwhm, eline_rel, background;
    } ov;
    sim_cmd->add_option("--kind", kind, "g | gstar | custom");
    sim_cmd->add_option("--id", emitter_id, "emitter id");
    sim_cmd->add_option("--power", power, "excitation power in uW (default Psat)");
    sim_cmd->add_option("--duration-s", duration_s, "cw stream duration");
    sim_cmd->add_option("--photons", photons, "detected photons in the decay histogram");
    sim_cmd->add_option("--period-ns", period_ns, "pulse period");
    sim_cmd->add_option("--tau", ov.tau, "lifetime ns");
    sim_cmd->add_option("--qe", ov.qe, "quantum efficiency");
    sim_cmd->add_option("--isat", ov.isat, "saturation intensity kcps");
    sim_cmd->add_option("--psat", ov.psat, "saturation power uW");
    sim_cmd->add_option("--visibility", ov.visibility, "polarization visibility");
    sim_cmd->add_option("--phi0", ov.phi0, "polarization axis deg");
    sim_cmd->add_option("--zpl", ov.zpl, "ZPL wavelength nm");
    sim_cmd->add_option("--zpl-fwhm", ov.zpl_fwhm, "ZPL fwhm nm");
    sim_cmd->add_option("--eline-rel", ov.eline_rel, "E-line relative intensity");
    sim_cmd->add_option("--background", ov.background, "background cps");

    // ---- g2 ----
    auto* g2_cmd = app.add_subcommand("g2", "correlate a two-channel stream");
    std::string g2_input;
    G2Options g2opt;
    g2_cmd->add_option("input", g2_input, "stream.ttg or bundle dir")->required();
    g2_cmd->add_option("--window-ns", g2opt.window_ns);
    g2_cmd->add_option("--bin-width-ns", g2opt.bin_width_ns);
    g2_cmd->add_option("--avg-bins", g2opt.avg_bins);
    g2_cmd->add_option("--threads", g2opt.threads);

    // ---- fits ----
    auto* life_cmd = app.add_subcommand("fit-lifetime", "mono-exponential decay fit");
    std::string life_input;
    life_cmd->add_option("input", life_input, "decay.csv or bundle dir")->required();

    auto* sat_cmd = app.add_subcommand("fit-saturation", "saturation law fit");
    std::string sat_input;
    bool sat_background = false;
    sat_cmd->add_option("input", sat_input, "saturation.csv or bundle dir")->required();
    sat_cmd->add_flag("--background", sat_background, "fit a constant background too");

    auto* polar_cmd = app.add_subcommand("fit-polar", "polarization diagram fit");
    std::string polar_input;
    polar_cmd->add_option("input", polar_input, "polarization.csv or bundle dir")->required();

    // ---- spectrum ----
    auto* spec_cmd = app.add_subcommand("spectrum", "ZPL / E-line features");
    std::string spec_input;
    double zpl_lo = 0, zpl_hi = 0;
    spec_cmd->add_option("input", spec_input, "spectrum.csv or bundle dir")->required();
    spec_cmd->add_option("--zpl-lo", zpl_lo, "ZPL search range low nm (default: full trace)");
    spec_cmd->add_option("--zpl-hi", zpl_hi, "ZPL search range high nm");

    // ---- classify ----
    auto* cls_cmd = app.add_subcommand("classify", "four-fingerprint G/Gstar classification");
    std::string cls_input;
    classify::CriterionThresholds thresholds;
    cls_cmd->add_option("input", cls_input, "bundle dir")->required();
    cls_cmd->add_option("--window-ns", g2opt.window_ns);
    cls_cmd->add_option("--bin-width-ns", g2opt.bin_width_ns);
    cls_cmd->add_option("--avg-bins", g2opt.avg_bins);
    cls_cmd->add_option("--threads", g2opt.threads);
    cls_cmd->add_option("--lifetime-g-max", thresholds.lifetime_g_max_ns);
    cls_cmd->add_option("--lifetime-gstar-min", thresholds.lifetime_gstar_min_ns);
    cls_cmd->add_option("--visibility-g-max", thresholds.visibility_g_max);
    cls_cmd->add_option("--visibility-gstar-min", thresholds.visibility_gstar_min);
    cls_cmd->add_option("--axis-tolerance", thresholds.axis_tolerance_deg);

    // ---- qe-bound ----
    auto* qe_cmd = app.add_subcommand("qe-bound", "quantum-efficiency upper bound");
    double isat_g = 7.9, isat_gstar = 68.0, tau_g = 4.9, tau_gstar = 33.4;
    double thickness_g = 60.0, thickness_gstar = 220.0;
    bool worst_case = false;
    qe_cmd->add_option("--isat-g", isat_g, "kcps");
    qe_cmd->add_option("--isat-gstar", isat_gstar, "kcps");
    qe_cmd->add_option("--tau-g", tau_g, "ns");
    qe_cmd->add_option("--tau-gstar", tau_gstar, "ns");
    qe_cmd->add_option("--thickness-g", thickness_g, "silicon layer nm");
    qe_cmd->add_option("--thickness-gstar", thickness_gstar, "silicon layer nm");
    qe_cmd->add_flag("--worst-case", worst_case,
                     "use range endpoints maximizing the bound instead of the maxima");

    // ---- stats ----
    auto* stats_cmd = app.add_subcommand("stats", "ZPL population statistics");
    std::vector<std::string> stats_inputs;
    stats_cmd->add_option("inputs", stats_inputs, "spectrum files or bundle dirs")
        ->required()
        ->expected(-1);

    // ---- report ----
    auto* report_cmd = app.add_subcommand("report", "per-emitter summary with plot data");
    std::string report_input;
    bool report_svg = false;
    report_cmd->add_option("input", report_input, "bundle dir")->required();
    report_cmd->add_flag("--svg", report_svg, "also render SVG overlays");

    for (auto* cmd : app.get_subcommands({})) {
        cmd->add_option("--seed", seed, "rng seed");
        if (cmd != sim_cmd && cmd != report_cmd)
            cmd->add_option("--out", out_path, "also write output to this file");
    }
    std::string sim_out, report_out;
    sim_cmd->add_option("--out", sim_out, "output bundle directory")->required();
    report_cmd->add_option("--out", report_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);
    out.set_path(out_path);

    try {
        if (sim_cmd->parsed()) {
            sim::EmitterModel m = model_for_kind(kind);
            if (ov.tau) m.lifetime_tau_ns = *ov.tau;
            if (ov.qe) m.quantum_efficiency = *ov.qe;
            if (ov.isat) m.sat_intensity_kcps = *ov.isat;
            if (ov.psat) m.sat_power_uW = *ov.psat;
            if (ov.visibility) m.polar_visibility = *ov.visibility;
            if (ov.phi0) m.polar_axis_deg = *ov.phi0;
            if (ov.zpl) m.zpl_wavelength_nm = *ov.zpl;
            if (ov.zpl_fwhm) m.zpl_fwhm_nm = *ov.zpl_fwhm;
            if (ov.eline_rel) m.eline_relative_intensity = *ov.eline_rel;
            if (ov.background) m.background_cps = *ov.background;

            sim::SimConfig c;
            c.seed = seed;
            c.duration_s = duration_s;
            c.excitation_power_uW = power > 0 ? power : m.sat_power_uW;
            if (period_ns > 0) c.pulse_period_ns = period_ns;
            // keep the cw stream photon-efficient for g2 analysis
            c.detection_probability = 1.0;
            return cmd_simulate(kind, m, c, photons, sim_out, emitter_id, out);
        }

        if (g2_cmd->parsed()) {
            const auto s = io::read_time_tags(resolve(g2_input, "stream.ttg"));
            auto h = correlator::correlate(s, g2opt.window_ns, g2opt.bin_width_ns,
                                           0, 1, g2opt.threads);
            auto g = correlator::g2_at_zero(h, g2opt.avg_bins);
            out.kv_double("g2_zero", g.value);
            out.kv_double("g2_sigma", g.sigma);
            out.kv("single_emitter", correlator::is_single_emitter(g) ? "true" : "false");
            out.flush();
            return 0;
        }

        if (life_cmd->parsed()) {
            const auto h = io::read_decay_csv(resolve(life_input, "decay.csv"));
            const auto r = fit::fit_exponential_decay(h);
            out.kv_double("tau_ns", r.value("tau"));
            out.kv_double("tau_sigma_ns", r.sigma("tau"));
            out.kv_double("amplitude", r.value("A"));
            out.kv_double("background", r.value("B"));
            out.kv("converged", r.converged ? "true" : "false");
            out.kv("iterations", r.iterations);
            out.flush();
            return 0;
        }

        if (sat_cmd->parsed()) {
            const auto s = io::read_saturation_csv(resolve(sat_input, "saturation.csv"));
            const auto r = fit::fit_saturation(s, sat_background);
            out.kv_double("isat_kcps", r.value("Isat"));
            out.kv_double("isat_sigma_kcps", r.sigma("Isat"));
            out.kv_double("psat_uW", r.value("Psat"));
            out.kv_double("psat_sigma_uW", r.sigma("Psat"));
            if (sat_background) out.kv_double("background_kcps", r.value("B"));
            out.kv("converged", r.converged ? "true" : "false");
            out.kv("ill_conditioned", r.ill_conditioned ? "true" : "false");
            out.flush();
            return 0;
        }

        if (polar_cmd->parsed()) {
            const auto s =
                io::read_polarization_csv(resolve(polar_input, "polarization.csv"));
            const auto r = fit::fit_polarization(s);
            out.kv_double("i0_cps", r.value("I0"));
            out.kv_double("visibility", r.value("V"));
            out.kv_double("visibility_sigma", r.sigma("V"));
            out.kv_double("phi0_deg", r.value("phi0"));
            out.kv("phi0_undefined", r.phi0_undefined ? "true" : "false");
            out.kv("converged", r.converged ? "true" : "false");
            out.flush();
            return 0;
        }

        if (spec_cmd->parsed()) {
            const auto s = io::read_spectrum_csv(resolve(spec_input, "spectrum.csv"));
            const double lo = zpl_lo > 0 ? zpl_lo : s.min_wavelength();
            const double hi = zpl_hi > 0 ? zpl_hi : s.max_wavelength();
            const auto f = spectral::analyze_spectrum(s, lo, hi);
            out.kv_double("zpl_nm", f.zpl_wavelength_nm);
            out.kv_double("zpl_mev", f.zpl_energy_mev);
            out.kv_double("zpl_fwhm_nm", f.zpl_fwhm_nm);
            out.kv("eline_measured", f.eline_measured ? "true" : "false");
            out.kv("eline_present", f.eline_present ? "true" : "false");
            if (f.eline_present) out.kv_double("eline_nm", f.eline_wavelength_nm);
            out.kv_double("eline_snr", f.eline_snr);
            if (f.sideband_energy_mev)
                out.kv_double("sideband_mev", *f.sideband_energy_mev);
            out.flush();
            return 0;
        }

        if (cls_cmd->parsed()) {
            const auto b = io::read_bundle(cls_input);
            std::vector<std::string> notes;
            const auto f = features_from_bundle(b, g2opt, notes);
            const auto report = classify::classify_emitter(f, thresholds);
            out.kv("label", classify::to_string(report.label));
            out.kv("votes_g", report.votes_g);
            out.kv("votes_gstar", report.votes_gstar);
            for (const auto& [name, verdict] : report.criterion_verdicts)
                out.kv("criterion_" + name, classify::to_string(verdict));
            out.kv_double("g2_zero", f.g2_zero.value);
            out.kv_double("tau_ns", f.lifetime_tau_ns);
            out.kv_double("visibility", f.polar_visibility);
            out.kv_double("phi0_deg", f.polar_axis_phi0_deg);
            out.kv("rationale", report.rationale);
            for (const auto& n : notes) out.kv("note", n);
            out.flush();
            return 0;
        }

        if (qe_cmd->parsed()) {
            const auto model = classify::CollectionEfficiencyModel::soi_defaults();
            const auto b = classify::qe_upper_bound(
                isat_g, isat_gstar, tau_g, tau_gstar, model, thickness_g,
                thickness_gstar, !worst_case);
            out.kv_double("eta_g_bound", b.eta_g);
            out.kv_double("coll_g", b.coll_g_used);
            out.kv_double("coll_gstar", b.coll_gstar_used);
            out.kv("exceeds_unity", b.exceeds_unity ? "true" : "false");
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "with eta_Gstar <= 1, the G-center quantum efficiency "
                          "is not greater than %.2g%%",
                          b.eta_g * 100.0);
            out.kv("statement", buf);
            out.flush();
            return 0;
        }

        if (stats_cmd->parsed()) {
            std::vector<double> zpls;
            for (const auto& input : stats_inputs) {
                const auto s = io::read_spectrum_csv(resolve(input, "spectrum.csv"));
                const auto peak =
                    spectral::detect_zpl(s, s.min_wavelength(), s.max_wavelength());
                zpls.push_back(peak.wavelength_nm);
            }
            const auto st = spectral::zpl_population_stats(zpls);
            out.kv("n", st.n);
            out.kv_double("mean_nm", st.mean_nm);
            out.kv_double("std_nm", st.std_dev_nm);
            out.kv_double("min_nm", st.min_nm);
            out.kv_double("max_nm", st.max_nm);
            out.flush();
            return 0;
        }

        if (report_cmd->parsed()) {
            const auto b = io::read_bundle(report_input);
            fs::create_directories(report_out);
            out.kv("emitter_id", b.meta.emitter_id);

            if (b.decay) {
                const auto r = fit::fit_exponential_decay(*b.decay);
                const auto model = fit::exponential_decay_model();
                const auto& counts = b.decay->counts();
                const std::size_t peak = static_cast<std::size_t>(std::distance(
                    counts.begin(), std::max_element(counts.begin(), counts.end())));
                const double t0 = b.decay->bin_center_ns(peak);
                std::vector<std::array<double, 3>> rows;
                for (std::size_t i = peak; i < counts.size(); ++i) {
                    const double t = b.decay->bin_center_ns(i);
                    rows.push_back({t, static_cast<double>(counts[i]),
                                    model(r.parameters, t - t0, nullptr)});
                }
                write_overlay_csv(report_out + "/decay_overlay.csv", "ns", "counts", rows);
                if (report_svg)
                    write_overlay_svg(report_out + "/decay_overlay.svg", rows, "decay");
                out.kv_double("tau_ns", r.value("tau"));
                out.kv_double("tau_sigma_ns", r.sigma("tau"));
            }
            if (b.saturation) {
                const auto r = fit::fit_saturation(*b.saturation);
                const auto model = fit::saturation_model(false);
                std::vector<std::array<double, 3>> rows;
                for (const auto& p : b.saturation->points())
                    rows.push_back({p.power_uW, p.intensity_kcps,
                                    model(r.parameters, p.power_uW, nullptr)});
                write_overlay_csv(report_out + "/saturation_overlay.csv", "uW", "kcps", rows);
                if (report_svg)
                    write_overlay_svg(report_out + "/saturation_overlay.svg", rows,
                                      "saturation");
                out.kv_double("isat_kcps", r.value("Isat"));
                out.kv_double("psat_uW", r.value("Psat"));
            }
            if (b.polarization) {
                const auto r = fit::fit_polarization(*b.polarization);
                const auto model = fit::polarization_model();
                std::vector<std::array<double, 3>> rows;
                for (const auto& p : b.polarization->points())
                    rows.push_back({p.angle_deg, p.intensity,
                                    model(r.parameters, p.angle_deg, nullptr)});
                write_overlay_csv(report_out + "/polarization_overlay.csv", "deg", "cps",
                                  rows);
                if (report_svg)
                    write_overlay_svg(report_out + "/polarization_overlay.svg", rows,
                                      "polarization");
                out.kv_double("visibility", r.value("V"));
                out.kv_double("phi0_deg", r.value("phi0"));
            }
            if (b.spectrum) {
                const auto f = spectral::analyze_spectrum(
                    *b.spectrum, b.spectrum->min_wavelength(),
                    b.spectrum->max_wavelength());
                out.kv_double("zpl_nm", f.zpl_wavelength_nm);
                out.kv("eline_present", f.eline_present ? "true" : "false");
            }
            out.kv("report_dir", report_out);
            out.flush();
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
