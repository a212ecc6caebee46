#include "photonkit/classify.hpp"

#include <cmath>
#include <sstream>

#include "photonkit/errors.hpp"

namespace photonkit::classify {

namespace {

Verdict axis_verdict(const EmitterFeatures& f, const CriterionThresholds& t,
                     Verdict visibility_verdict) {
    // Without a defined diagram axis the criterion carries no information.
    if (f.polar_axis_undefined && visibility_verdict == Verdict::neutral)
        return Verdict::neutral;
    if (f.polar_axis_undefined) return Verdict::neutral;
    double phi = std::fmod(f.polar_axis_phi0_deg, 180.0);
    if (phi < 0) phi += 180.0;
    const double d0 = std::min(phi, 180.0 - phi);       // distance to 0 mod 180
    const double d90 = std::abs(phi - 90.0);            // distance to 90
    return std::min(d0, d90) <= t.axis_tolerance_deg ? Verdict::pro_g
                                                     : Verdict::pro_gstar;
}

}  // namespace

std::map<std::string, Verdict> evaluate_criteria(const EmitterFeatures& f,
                                                 const CriterionThresholds& t) {
    if (!(f.lifetime_tau_ns > 0)) throw DomainError("lifetime must be positive");
    if (f.polar_visibility < 0 || f.polar_visibility > 1)
        throw DomainError("visibility must be in [0, 1]");

    std::map<std::string, Verdict> v;

    switch (f.eline) {
        case Tristate::present: v["eline"] = Verdict::pro_g; break;
        case Tristate::absent: v["eline"] = Verdict::pro_gstar; break;
        case Tristate::unmeasured: v["eline"] = Verdict::neutral; break;
    }

    if (f.lifetime_tau_ns <= t.lifetime_g_max_ns)
        v["lifetime"] = Verdict::pro_g;
    else if (f.lifetime_tau_ns >= t.lifetime_gstar_min_ns)
        v["lifetime"] = Verdict::pro_gstar;
    else
        v["lifetime"] = Verdict::neutral;

    if (f.polar_visibility <= t.visibility_g_max)
        v["visibility"] = Verdict::pro_g;
    else if (f.polar_visibility >= t.visibility_gstar_min)
        v["visibility"] = Verdict::pro_gstar;
    else
        v["visibility"] = Verdict::neutral;

    v["axis"] = axis_verdict(f, t, v["visibility"]);
    return v;
}

ClassificationReport classify_emitter(const EmitterFeatures& f,
                                      const CriterionThresholds& t) {
    ClassificationReport r;
    std::ostringstream why;

    if (!correlator::is_single_emitter(f.g2_zero)) {
        r.label = Label::not_single;
        why << "g2(0) = " << f.g2_zero.value << " +/- " << f.g2_zero.sigma
            << " fails the antibunching gate (< 0.5 with 1 sigma guard)";
        r.rationale = why.str();
        return r;
    }

    r.criterion_verdicts = evaluate_criteria(f, t);
    for (const auto& [name, verdict] : r.criterion_verdicts) {
        if (verdict == Verdict::pro_g) ++r.votes_g;
        if (verdict == Verdict::pro_gstar) ++r.votes_gstar;
    }

    if (r.votes_g >= 3 && r.votes_gstar <= 1)
        r.label = Label::G;
    else if (r.votes_gstar >= 3 && r.votes_g <= 1)
        r.label = Label::Gstar;
    else
        r.label = Label::inconclusive;

    why << "votes: " << r.votes_g << " pro-G, " << r.votes_gstar
        << " pro-Gstar;";
    for (const auto& [name, verdict] : r.criterion_verdicts)
        why << " " << name << "=" << to_string(verdict);
    r.rationale = why.str();
    return r;
}

CollectionEfficiencyModel CollectionEfficiencyModel::soi_defaults() {
    CollectionEfficiencyModel m;
    m.entries[60.0] = {0.025, 0.04};
    m.entries[220.0] = {0.005, 0.02};
    return m;
}

CollectionEfficiencyRange CollectionEfficiencyModel::lookup(
    double thickness_nm) const {
    for (const auto& [thickness, range] : entries) {
        if (std::abs(thickness - thickness_nm) < 1e-9) {
            if (!(range.min_eff > 0 && range.min_eff <= range.max_eff &&
                  range.max_eff < 1))
                throw DomainError("invalid collection efficiency range");
            return range;
        }
    }
    throw ModelCoverageError("no collection efficiency entry for this thickness");
}

double qe_ratio(const QEInputs& in) {
    const double vals[] = {in.eta_gstar, in.isat_g_kcps, in.isat_gstar_kcps,
                           in.tau_g_ns,  in.tau_gstar_ns, in.coll_g,
                           in.coll_gstar};
    for (double v : vals)
        if (!(v > 0)) throw DomainError("all qe_ratio inputs must be positive");
    if (in.eta_gstar > 1.0)
        throw DomainError("eta_Gstar cannot exceed 1");
    return in.eta_gstar * (in.isat_g_kcps / in.isat_gstar_kcps) *
           (in.tau_g_ns / in.tau_gstar_ns) * (in.coll_gstar / in.coll_g);
}

QEBound qe_upper_bound(double isat_g_kcps, double isat_gstar_kcps,
                       double tau_g_ns, double tau_gstar_ns,
                       const CollectionEfficiencyModel& model,
                       double thickness_g_nm, double thickness_gstar_nm,
                       bool brightest_selected) {
    const auto range_g = model.lookup(thickness_g_nm);
    const auto range_gstar = model.lookup(thickness_gstar_nm);

    QEBound b;
    if (brightest_selected) {
        b.coll_g_used = range_g.max_eff;
        b.coll_gstar_used = range_gstar.max_eff;
    } else {
        // Worst case for the bound: maximize coll_Gstar / coll_G.
        b.coll_g_used = range_g.min_eff;
        b.coll_gstar_used = range_gstar.max_eff;
    }
    b.eta_g = qe_ratio({1.0, isat_g_kcps, isat_gstar_kcps, tau_g_ns,
                        tau_gstar_ns, b.coll_g_used, b.coll_gstar_used});
    b.exceeds_unity = b.eta_g > 1.0;
    return b;
}

const char* to_string(Label l) {
    switch (l) {
        case Label::G: return "G";
        case Label::Gstar: return "Gstar";
        case Label::inconclusive: return "inconclusive";
        case Label::not_single: return "not_single";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pro_g: return "pro-G";
        case Verdict::pro_gstar: return "pro-Gstar";
        case Verdict::neutral: return "neutral";
    }
    return "?";
}

}  // namespace photonkit::classify
