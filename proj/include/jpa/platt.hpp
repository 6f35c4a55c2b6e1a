#pragma once

#include <array>
#include <vector>

#include "jpa/types.hpp"

namespace jpa {

/// Sigmoid calibration p(m) = 1 / (1 + exp(A m + B)). A negative A maps
/// larger margins to larger probabilities.
struct PlattParams {
    double a = 0.0;
    double b = 0.0;
};

double platt_apply(const PlattParams& platt, double margin);

/// Negative log-likelihood of regularized targets under the sigmoid; the
/// targets t replace raw 0/1 labels to keep the fit away from saturation.
double platt_nll(const std::vector<double>& margins, const std::vector<double>& targets, double a,
                 double b);

/// Analytic gradient of platt_nll in (a, b). Exposed so the optimizer step
/// can be checked against finite differences.
std::array<double, 2> platt_gradient(const std::vector<double>& margins,
                                     const std::vector<double>& targets, double a, double b);

/// Maximum-likelihood sigmoid fit by damped Newton iterations.
///
/// Labels are +-1 and both classes must be present. Targets follow the
/// usual regularization t+ = (N+ + 1)/(N+ + 2), t- = 1/(N- + 2). When the
/// margins carry no slope information (all equal), A is pinned to 0 and
/// only the bias is fitted; the caller gets a well-defined constant
/// calibration instead of an error.
PlattParams platt_fit(const std::vector<double>& margins, const std::vector<int>& labels);

}  // namespace jpa
