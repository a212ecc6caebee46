#pragma once

#include <functional>
#include <string>
#include <vector>

#include "photonkit/types.hpp"

namespace photonkit::fit {

struct DataPoint {
    double x;
    double y;
    double weight;  // > 0
};

struct FitOptions {
    int max_iterations = 200;
    double gradient_tol = 1e-10;  // scaled by max(1, cost)
    double step_tol = 1e-12;
};

struct FitResult {
    std::vector<std::string> parameter_names;
    std::vector<double> parameters;
    std::vector<double> sigmas;  // 1-sigma, from the scaled inverse normal matrix
    double residual_norm = 0.0;  // sqrt of the weighted sum of squared residuals
    bool converged = false;
    int iterations = 0;
    bool ill_conditioned = false;  // saturation fit: powers do not reach 0.2*Psat
    bool phi0_undefined = false;   // polarization fit: V ~ 0, axis meaningless

    double value(const std::string& name) const;
    double sigma(const std::string& name) const;
};

// Evaluates the model at x; when grad != nullptr it must be filled with
// d(model)/d(param) for every parameter.
using Model = std::function<double(const std::vector<double>& params, double x,
                                   double* grad)>;

FitResult solve_least_squares(const Model& model,
                              const std::vector<DataPoint>& data,
                              std::vector<double> init,
                              std::vector<std::string> names,
                              const FitOptions& options = {});

// The three parametric models, exposed for direct evaluation and for
// finite-difference checks of their gradients.
Model exponential_decay_model();            // params {A, tau, B}; A*exp(-t/tau)+B
Model saturation_model(bool background);    // params {Isat, Psat[, B]}; Isat/(1+Psat/P)
Model polarization_model();                 // params {I0, V, phi0_deg}; I0*(1-V+V*cos^2)

// Mono-exponential tail fit over bins at and after the histogram maximum;
// the time origin is shifted to the peak bin center. Poisson weights.
FitResult fit_exponential_decay(const DecayHistogram& h,
                                const FitOptions& options = {});

FitResult fit_saturation(const SaturationSeries& s, bool include_background = false,
                         const FitOptions& options = {});

// phi0 is canonicalized into [0, 180) and V into [0, 1].
FitResult fit_polarization(const PolarizationScan& p,
                           const FitOptions& options = {});

}  // namespace photonkit::fit
