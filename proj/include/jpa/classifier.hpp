#pragma once

#include <variant>
#include <vector>

#include "jpa/types.hpp"

namespace jpa {

/// Linear decision function w . x + bias on standardized features.
struct LogisticModel {
    Vec weights;
    double bias = 0.0;
};

/// Kernelized decision function sum_i coeff_i K(sv_i, x) + bias with the
/// Gaussian kernel K(u, v) = exp(-gamma |u - v|^2); coeff folds the label
/// into the dual variable.
struct RbfSvmModel {
    Mat support;  // one support vector per row
    Vec coeff;
    double bias = 0.0;
    double gamma = 1.0;
};

/// The downstream probability stage only needs a margin, so both classifier
/// families sit behind one variant.
using PairClassifier = std::variant<LogisticModel, RbfSvmModel>;

double classifier_margin(const PairClassifier& clf, const Vec& x);

/// L2-regularized logistic regression fitted by damped Newton iterations.
/// Labels are +-1; the bias is not regularized.
LogisticModel fit_logistic(const Mat& features, const std::vector<int>& labels, double lambda,
                           int max_iter = 50);

/// Soft-margin kernel machine trained by sequential minimal optimization
/// (random second choice, seeded). Small-scale by design; callers cap the
/// sample count.
RbfSvmModel fit_rbf_svm(const Mat& features, const std::vector<int>& labels, double c,
                        double gamma, std::uint64_t seed);

}  // namespace jpa
