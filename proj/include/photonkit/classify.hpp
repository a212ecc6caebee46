#pragma once

#include <map>
#include <string>

#include "photonkit/correlator.hpp"

namespace photonkit::classify {

enum class Tristate { present, absent, unmeasured };
enum class Verdict { pro_g, pro_gstar, neutral };
enum class Label { G, Gstar, inconclusive, not_single };

struct EmitterFeatures {
    correlator::G2Zero g2_zero;
    Tristate eline = Tristate::unmeasured;
    double lifetime_tau_ns = 0;
    double lifetime_sigma_ns = 0;
    double polar_visibility = 0;
    double polar_visibility_sigma = 0;
    double polar_axis_phi0_deg = 0;  // relative to the [110] crystal axis
    bool polar_axis_undefined = false;
    double sat_intensity_kcps = 0;
    double sat_power_uW = 0;
};

// Neutral bands sit between the two reported populations; see the docs for
// how each default was chosen.
struct CriterionThresholds {
    double lifetime_g_max_ns = 10.0;
    double lifetime_gstar_min_ns = 25.0;
    double visibility_g_max = 0.75;
    double visibility_gstar_min = 0.80;
    double axis_tolerance_deg = 10.0;
};

struct ClassificationReport {
    Label label = Label::inconclusive;
    std::map<std::string, Verdict> criterion_verdicts;
    int votes_g = 0;
    int votes_gstar = 0;
    std::string rationale;
};

std::map<std::string, Verdict> evaluate_criteria(
    const EmitterFeatures& f, const CriterionThresholds& t = {});

// Antibunching gate first; then G/Gstar when one side collects >= 3 votes
// and the other at most 1; inconclusive otherwise.
ClassificationReport classify_emitter(const EmitterFeatures& f,
                                      const CriterionThresholds& t = {});

struct CollectionEfficiencyRange {
    double min_eff;
    double max_eff;
};

// layer thickness (nm) -> collection efficiency range for a maximally
// collected in-plane dipole.
struct CollectionEfficiencyModel {
    std::map<double, CollectionEfficiencyRange> entries;
    static CollectionEfficiencyModel soi_defaults();  // 60 nm and 220 nm layers
    CollectionEfficiencyRange lookup(double thickness_nm) const;
};

struct QEInputs {
    double eta_gstar;   // quantum efficiency of the reference Gstar center
    double isat_g_kcps;
    double isat_gstar_kcps;
    double tau_g_ns;
    double tau_gstar_ns;
    double coll_g;      // collection efficiency for the G center
    double coll_gstar;
};

struct QEBound {
    double eta_g;
    bool exceeds_unity = false;  // flagged, never silently clamped
    double coll_g_used = 0;
    double coll_gstar_used = 0;
};

// eta_G = eta_Gstar * (Isat_G/Isat_Gstar) * (tau_G/tau_Gstar)
//                   * (coll_Gstar/coll_G);
// collection efficiencies divide the detected intensities they inflate.
double qe_ratio(const QEInputs& in);

// Upper bound with eta_Gstar = 1. brightest_selected picks the maximum of
// both collection ranges (the brightest defects were measured); otherwise the
// worst-case endpoints that maximize the bound are used.
QEBound qe_upper_bound(double isat_g_kcps, double isat_gstar_kcps,
                       double tau_g_ns, double tau_gstar_ns,
                       const CollectionEfficiencyModel& model,
                       double thickness_g_nm, double thickness_gstar_nm,
                       bool brightest_selected = true);

const char* to_string(Label l);
const char* to_string(Verdict v);

}  // namespace photonkit::classify
