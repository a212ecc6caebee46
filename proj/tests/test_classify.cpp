#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "photonkit/classify.hpp"
#include "photonkit/errors.hpp"

using namespace photonkit;
using classify::Label;
using classify::Tristate;
using classify::Verdict;

namespace {

classify::EmitterFeatures genuine_g() {
    classify::EmitterFeatures f;
    f.g2_zero = {0.1, 0.05};
    f.eline = Tristate::present;
    f.lifetime_tau_ns = 4.9;
    f.polar_visibility = 0.62;
    f.polar_axis_phi0_deg = 0.0;
    return f;
}

classify::EmitterFeatures genuine_gstar() {
    classify::EmitterFeatures f;
    f.g2_zero = {0.1, 0.05};
    f.eline = Tristate::absent;
    f.lifetime_tau_ns = 33.4;
    f.polar_visibility = 0.90;
    f.polar_axis_phi0_deg = 37.0;
    return f;
}

}  // namespace

TEST_CASE("genuine G features give four pro-G verdicts") {
    auto v = classify::evaluate_criteria(genuine_g());
    CHECK(v.at("eline") == Verdict::pro_g);
    CHECK(v.at("lifetime") == Verdict::pro_g);
    CHECK(v.at("visibility") == Verdict::pro_g);
    CHECK(v.at("axis") == Verdict::pro_g);
}

TEST_CASE("genuine Gstar features give four pro-Gstar verdicts") {
    auto v = classify::evaluate_criteria(genuine_gstar());
    CHECK(v.at("eline") == Verdict::pro_gstar);
    CHECK(v.at("lifetime") == Verdict::pro_gstar);
    CHECK(v.at("visibility") == Verdict::pro_gstar);
    CHECK(v.at("axis") == Verdict::pro_gstar);
}

TEST_CASE("values inside the neutral bands are neutral") {
    classify::EmitterFeatures f;
    f.g2_zero = {0.1, 0.05};
    f.eline = Tristate::unmeasured;
    f.lifetime_tau_ns = 17.0;
    f.polar_visibility = 0.78;
    f.polar_axis_phi0_deg = 5.0;
    auto v = classify::evaluate_criteria(f);
    CHECK(v.at("eline") == Verdict::neutral);
    CHECK(v.at("lifetime") == Verdict::neutral);
    CHECK(v.at("visibility") == Verdict::neutral);
    CHECK(v.at("axis") == Verdict::pro_g);
}

TEST_CASE("axis criterion is invariant under 180 degree shifts") {
    auto f = genuine_g();
    for (double base : {0.0, 5.0, 90.0, 95.0, 170.0, 37.0}) {
        f.polar_axis_phi0_deg = base;
        const auto v1 = classify::evaluate_criteria(f).at("axis");
        f.polar_axis_phi0_deg = base + 180.0;
        const auto v2 = classify::evaluate_criteria(f).at("axis");
        CHECK(v1 == v2);
    }
    // near-axis vs off-axis
    f.polar_axis_phi0_deg = 171.0;  // 9 degrees from 0 mod 180
    CHECK(classify::evaluate_criteria(f).at("axis") == Verdict::pro_g);
    f.polar_axis_phi0_deg = 100.5;
    CHECK(classify::evaluate_criteria(f).at("axis") == Verdict::pro_gstar);
}

TEST_CASE("classification labels and gate precedence") {
    CHECK(classify::classify_emitter(genuine_g()).label == Label::G);
    CHECK(classify::classify_emitter(genuine_gstar()).label == Label::Gstar);

    auto f = genuine_g();
    f.g2_zero = {0.8, 0.02};
    CHECK(classify::classify_emitter(f).label == Label::not_single);

    // two pro-G, two pro-Gstar: inconclusive
    auto mixed = genuine_g();
    mixed.lifetime_tau_ns = 33.4;
    mixed.polar_visibility = 0.90;
    auto r = classify::classify_emitter(mixed);
    CHECK(r.label == Label::inconclusive);
    CHECK(r.votes_g == 2);
    CHECK(r.votes_gstar == 2);

    // 3 vs 1 still decides
    auto three = genuine_g();
    three.lifetime_tau_ns = 33.4;
    CHECK(classify::classify_emitter(three).label == Label::G);
}

TEST_CASE("relaxing a neutral band never flips a decided verdict") {
    auto f = genuine_g();
    classify::CriterionThresholds t;
    const auto before = classify::evaluate_criteria(f, t);
    t.lifetime_g_max_ns = 20.0;
    t.visibility_g_max = 0.79;
    const auto after = classify::evaluate_criteria(f, t);
    for (const auto& [name, v] : before) {
        if (v != Verdict::neutral) CHECK(after.at(name) == v);
    }
}

TEST_CASE("qe_ratio arithmetic") {
    classify::QEInputs in{1.0, 7.9, 68.0, 4.9, 33.4, 0.04, 0.02};
    CHECK(classify::qe_ratio(in) == doctest::Approx(0.00852).epsilon(2e-3));

    classify::QEInputs same{0.7, 5.0, 5.0, 10.0, 10.0, 0.03, 0.03};
    CHECK(classify::qe_ratio(same) == doctest::Approx(0.7));

    auto doubled = in;
    doubled.isat_g_kcps *= 2.0;
    CHECK(classify::qe_ratio(doubled) ==
          doctest::Approx(2.0 * classify::qe_ratio(in)).epsilon(1e-12));

    auto bad = in;
    bad.tau_g_ns = 0.0;
    CHECK_THROWS_AS(classify::qe_ratio(bad), DomainError);
}

TEST_CASE("qe upper bound over the SOI collection model") {
    const auto model = classify::CollectionEfficiencyModel::soi_defaults();

    // brightest defects selected: both efficiencies at their maxima
    auto b = classify::qe_upper_bound(7.9, 68.0, 4.9, 33.4, model, 60.0, 220.0);
    CHECK(b.eta_g == doctest::Approx(0.00852).epsilon(2e-3));
    CHECK(b.coll_g_used == doctest::Approx(0.04));
    CHECK(b.coll_gstar_used == doctest::Approx(0.02));
    CHECK_FALSE(b.exceeds_unity);

    // worst-case endpoints maximize coll_Gstar/coll_G
    auto w = classify::qe_upper_bound(7.9, 68.0, 4.9, 33.4, model, 60.0, 220.0,
                                      false);
    CHECK(w.eta_g == doctest::Approx(0.01364).epsilon(2e-3));
    CHECK(w.coll_g_used == doctest::Approx(0.025));

    // equal layers and equal ranges: collection factor drops out
    classify::CollectionEfficiencyModel eq;
    eq.entries[100.0] = {0.01, 0.03};
    auto e = classify::qe_upper_bound(7.9, 68.0, 4.9, 33.4, eq, 100.0, 100.0);
    CHECK(e.eta_g == doctest::Approx((7.9 / 68.0) * (4.9 / 33.4)).epsilon(1e-9));

    CHECK_THROWS_AS(
        classify::qe_upper_bound(7.9, 68.0, 4.9, 33.4, model, 150.0, 220.0),
        ModelCoverageError);
}

TEST_CASE("classification is deterministic") {
    auto f = genuine_gstar();
    auto r1 = classify::classify_emitter(f);
    auto r2 = classify::classify_emitter(f);
    CHECK(r1.label == r2.label);
    CHECK(r1.criterion_verdicts == r2.criterion_verdicts);
    CHECK(r1.rationale == r2.rationale);
}
