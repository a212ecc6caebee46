#include "photonkit/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "photonkit/errors.hpp"

namespace photonkit::fit {

namespace {

constexpr double kDeg2Rad = M_PI / 180.0;

struct Evaluation {
    Eigen::VectorXd residuals;  // sqrt(w) * (y - f)
    Eigen::MatrixXd jacobian;   // sqrt(w) * df/dp
    double cost;                // sum of squared residuals
};

Evaluation evaluate(const Model& model, const std::vector<DataPoint>& data,
                    const std::vector<double>& params, bool with_jacobian) {
    const auto n = static_cast<Eigen::Index>(data.size());
    const auto m = static_cast<Eigen::Index>(params.size());
    Evaluation ev;
    ev.residuals.resize(n);
    if (with_jacobian) ev.jacobian.resize(n, m);
    std::vector<double> grad(params.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& d = data[i];
        const double sw = std::sqrt(d.weight);
        const double f =
            model(params, d.x, with_jacobian ? grad.data() : nullptr);
        if (!std::isfinite(f))
            throw DomainError("model produced a non-finite value");
        ev.residuals[i] = sw * (d.y - f);
        if (with_jacobian) {
            for (Eigen::Index j = 0; j < m; ++j) {
                if (!std::isfinite(grad[j]))
                    throw DomainError("model gradient is non-finite");
                ev.jacobian(i, j) = sw * grad[j];
            }
        }
    }
    ev.cost = ev.residuals.squaredNorm();
    return ev;
}

}  // namespace

double FitResult::value(const std::string& name) const {
    for (std::size_t i = 0; i < parameter_names.size(); ++i)
        if (parameter_names[i] == name) return parameters[i];
    throw DomainError("unknown fit parameter: " + name);
}

double FitResult::sigma(const std::string& name) const {
    for (std::size_t i = 0; i < parameter_names.size(); ++i)
        if (parameter_names[i] == name) return sigmas[i];
    throw DomainError("unknown fit parameter: " + name);
}

FitResult solve_least_squares(const Model& model,
                              const std::vector<DataPoint>& data,
                              std::vector<double> init,
                              std::vector<std::string> names,
                              const FitOptions& options) {
    const std::size_t m = init.size();
    if (names.size() != m)
        throw DomainError("parameter name/init size mismatch");
    if (data.size() < m)
        throw InsufficientDataError("fewer data points than parameters");
    for (const auto& d : data)
        if (!(d.weight > 0)) throw DomainError("weights must be positive");

    std::vector<double> params = init;
    Evaluation ev = evaluate(model, data, params, true);

    double lambda = 1e-3;
    bool converged = false;
    int iterations = 0;

    auto gradient_ok = [&](const Evaluation& e) {
        const Eigen::VectorXd g = e.jacobian.transpose() * e.residuals;
        return g.lpNorm<Eigen::Infinity>() <=
               options.gradient_tol * std::max(1.0, e.cost);
    };

    for (; iterations < options.max_iterations; ++iterations) {
        if (gradient_ok(ev)) {
            converged = true;
            break;
        }
        const Eigen::MatrixXd jtj = ev.jacobian.transpose() * ev.jacobian;
        const Eigen::VectorXd jtr = ev.jacobian.transpose() * ev.residuals;

        bool accepted = false;
        while (lambda < 1e14) {
            Eigen::MatrixXd damped = jtj;
            for (Eigen::Index j = 0; j < damped.rows(); ++j)
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-300);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            if (ldlt.info() != Eigen::Success) {
                lambda *= 10;
                continue;
            }
            const Eigen::VectorXd step = ldlt.solve(jtr);
            std::vector<double> trial = params;
            for (std::size_t j = 0; j < m; ++j) trial[j] += step[j];
            Evaluation trial_ev = evaluate(model, data, trial, true);
            if (trial_ev.cost <= ev.cost) {  // accepted steps never increase cost
                const double pn = std::sqrt(std::inner_product(
                    params.begin(), params.end(), params.begin(), 0.0));
                params = std::move(trial);
                ev = std::move(trial_ev);
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = true;
                if (step.norm() <= options.step_tol * (pn + options.step_tol))
                    converged = gradient_ok(ev);
                break;
            }
            lambda *= 10;
        }
        if (!accepted) {
            converged = gradient_ok(ev);
            break;
        }
        if (converged) break;
    }
    if (!converged) converged = gradient_ok(ev);

    // Covariance of the linearized problem, scaled by reduced chi-square.
    // Parameters can differ in magnitude by many orders, so rescale the
    // normal matrix to unit diagonal before testing its rank.
    const Eigen::MatrixXd jtj = ev.jacobian.transpose() * ev.jacobian;
    Eigen::VectorXd scale(static_cast<Eigen::Index>(m));
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
        const double d = jtj(j, j);
        if (!(d > 0)) throw DegenerateFitError("singular normal matrix");
        scale[j] = 1.0 / std::sqrt(d);
    }
    const Eigen::MatrixXd normalized =
        scale.asDiagonal() * jtj * scale.asDiagonal();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normalized);
    lu.setThreshold(1e-12);
    if (lu.rank() < static_cast<Eigen::Index>(m))
        throw DegenerateFitError("singular normal matrix");
    const double dof = std::max<double>(1.0, static_cast<double>(data.size()) -
                                                 static_cast<double>(m));
    const double chi2_red = ev.cost / dof;
    const Eigen::MatrixXd cov =
        scale.asDiagonal() * lu.inverse() * scale.asDiagonal() * chi2_red;

    FitResult r;
    r.parameter_names = std::move(names);
    r.parameters = params;
    r.sigmas.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        r.sigmas[j] = std::sqrt(std::max(0.0, cov(static_cast<Eigen::Index>(j),
                                                  static_cast<Eigen::Index>(j))));
    r.residual_norm = std::sqrt(ev.cost);
    r.converged = converged;
    r.iterations = iterations;
    return r;
}

Model exponential_decay_model() {
    return [](const std::vector<double>& p, double t, double* grad) {
        const double a = p[0], tau = p[1], b = p[2];
        const double e = std::exp(-t / tau);
        if (grad) {
            grad[0] = e;
            grad[1] = a * e * t / (tau * tau);
            grad[2] = 1.0;
        }
        return a * e + b;
    };
}

Model saturation_model(bool background) {
    return [background](const std::vector<double>& p, double power, double* grad) {
        const double isat = p[0], psat = p[1];
        const double denom = 1.0 + psat / power;
        if (grad) {
            grad[0] = 1.0 / denom;
            grad[1] = -isat / (denom * denom * power);
            if (background) grad[2] = 1.0;
        }
        return isat / denom + (background ? p[2] : 0.0);
    };
}

Model polarization_model() {
    return [](const std::vector<double>& p, double angle_deg, double* grad) {
        const double i0 = p[0], v = p[1], phi0 = p[2];
        const double x = (angle_deg - phi0) * kDeg2Rad;
        const double c = std::cos(x);
        const double shape = 1.0 - v + v * c * c;
        if (grad) {
            grad[0] = shape;
            grad[1] = i0 * (c * c - 1.0);
            grad[2] = i0 * v * 2.0 * c * std::sin(x) * kDeg2Rad;
        }
        return i0 * shape;
    };
}

FitResult fit_exponential_decay(const DecayHistogram& h,
                                const FitOptions& options) {
    const auto& counts = h.counts();
    if (h.total_counts() == 0)
        throw InsufficientDataError("decay histogram has no counts");

    const std::size_t peak = static_cast<std::size_t>(std::distance(
        counts.begin(), std::max_element(counts.begin(), counts.end())));
    const double t_peak = h.bin_center_ns(peak);

    std::vector<DataPoint> data;
    data.reserve(counts.size() - peak);
    for (std::size_t i = peak; i < counts.size(); ++i) {
        const double y = static_cast<double>(counts[i]);
        data.push_back({h.bin_center_ns(i) - t_peak, y, 1.0 / std::max(y, 1.0)});
    }
    if (data.size() < 4)
        throw InsufficientDataError("too few bins after the histogram maximum");

    // Background guess from the tail of the histogram.
    const std::size_t tail_n = std::max<std::size_t>(3, data.size() / 20);
    double b0 = 0.0;
    for (std::size_t i = data.size() - tail_n; i < data.size(); ++i)
        b0 += data[i].y;
    b0 /= static_cast<double>(tail_n);

    const double a0 = std::max(data.front().y - b0, 1.0);

    // tau from the log-slope over the first decade of decay.
    double tau0 = 0.0;
    for (const auto& d : data) {
        if (d.y - b0 < a0 * 0.1) {
            tau0 = d.x / std::log(10.0);
            break;
        }
    }
    if (!(tau0 > 0)) tau0 = (data.back().x - data.front().x) / 3.0;
    if (!(tau0 > 0)) tau0 = h.bin_width_ns();

    FitResult r = solve_least_squares(exponential_decay_model(), data,
                                      {a0, tau0, b0}, {"A", "tau", "B"}, options);
    if (!(r.value("tau") > 0))
        throw DegenerateFitError("decay fit returned non-positive lifetime");
    return r;
}

FitResult fit_saturation(const SaturationSeries& s, bool include_background,
                         const FitOptions& options) {
    const auto& pts = s.points();
    if (pts.back().power_uW < 10.0 * pts.front().power_uW)
        throw InsufficientDataError(
            "saturation series must span at least a factor 10 in power");

    std::vector<DataPoint> data;
    data.reserve(pts.size());
    double max_i = 0.0;
    std::vector<double> powers;
    for (const auto& p : pts) {
        data.push_back({p.power_uW, p.intensity_kcps,
                        1.0 / std::max(p.intensity_kcps, 1e-3)});
        max_i = std::max(max_i, p.intensity_kcps);
        powers.push_back(p.power_uW);
    }
    std::nth_element(powers.begin(), powers.begin() + powers.size() / 2,
                     powers.end());
    const double psat0 = powers[powers.size() / 2];
    const double isat0 = 1.5 * std::max(max_i, 1e-3);

    std::vector<double> init = {isat0, psat0};
    std::vector<std::string> names = {"Isat", "Psat"};
    if (include_background) {
        init.push_back(0.0);
        names.push_back("B");
    }
    FitResult r = solve_least_squares(saturation_model(include_background), data,
                                      std::move(init), std::move(names), options);
    if (pts.back().power_uW < 0.2 * r.value("Psat")) r.ill_conditioned = true;
    return r;
}

namespace {

// 1 - V + V*cos^2 with V < 0 is the same family with the axis rotated by 90
// degrees; rewrite into the canonical parameterization.
void canonicalize_polarization(FitResult& r) {
    double i0 = r.parameters[0], v = r.parameters[1], phi0 = r.parameters[2];
    if (v < 0) {
        const double w = -v;
        i0 *= (1.0 + w);
        v = w / (1.0 + w);
        phi0 += 90.0;
    }
    v = std::clamp(v, 0.0, 1.0);
    phi0 = std::fmod(phi0, 180.0);
    if (phi0 < 0) phi0 += 180.0;
    r.parameters = {i0, v, phi0};
}

}  // namespace

FitResult fit_polarization(const PolarizationScan& p, const FitOptions& options) {
    const auto& pts = p.points();
    double lo = 0, hi = 0, span_lo = 360, span_hi = 0;
    double phi_max = 0;
    lo = hi = pts.front().intensity;
    for (const auto& q : pts) {
        if (q.intensity > hi) {
            hi = q.intensity;
            phi_max = q.angle_deg;
        }
        lo = std::min(lo, q.intensity);
        span_lo = std::min(span_lo, std::fmod(q.angle_deg, 180.0));
        span_hi = std::max(span_hi, std::fmod(q.angle_deg, 180.0));
    }
    {
        // Require >= 180 degrees of coverage modulo the physical period.
        double min_a = 360, max_a = 0;
        for (const auto& q : pts) {
            min_a = std::min(min_a, q.angle_deg);
            max_a = std::max(max_a, q.angle_deg);
        }
        if (max_a - min_a < 157.5)
            throw InsufficientDataError("polarization scan must span >= 180 degrees");
    }

    if (hi - lo <= 1e-12 * std::max(hi, 1.0)) {
        // Constant scan: V = 0 exactly, the axis is meaningless.
        double mean = 0;
        for (const auto& q : pts) mean += q.intensity;
        mean /= static_cast<double>(pts.size());
        FitResult r;
        r.parameter_names = {"I0", "V", "phi0"};
        r.parameters = {mean, 0.0, 0.0};
        r.sigmas = {0.0, 0.0, 0.0};
        r.residual_norm = 0.0;
        r.converged = true;
        r.iterations = 0;
        r.phi0_undefined = true;
        return r;
    }

    std::vector<DataPoint> data;
    data.reserve(pts.size());
    for (const auto& q : pts)
        data.push_back({q.angle_deg, q.intensity,
                        1.0 / std::max(q.intensity, 1.0)});

    const double v0 = std::clamp(1.0 - lo / hi, 0.05, 0.99);
    FitResult r = solve_least_squares(polarization_model(), data,
                                      {hi, v0, std::fmod(phi_max, 180.0)},
                                      {"I0", "V", "phi0"}, options);
    canonicalize_polarization(r);
    if (r.value("V") < 1e-6 || r.value("V") < 2.0 * r.sigma("V"))
        r.phi0_undefined = true;
    return r;
}

}  // namespace photonkit::fit
