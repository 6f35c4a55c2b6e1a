#include "jpa/platt.hpp"

#include <algorithm>
#include <cmath>

namespace jpa {

namespace {

/// log(1 + exp(s)) without overflow.
double softplus(double s) { return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

double sigmoid_of_score(double s) {
    // p = 1 / (1 + exp(s)), stable on both tails.
    if (s >= 0.0) {
        const double e = std::exp(-s);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(s));
}

}  // namespace

double platt_apply(const PlattParams& platt, double margin) {
    return sigmoid_of_score(platt.a * margin + platt.b);
}

double platt_nll(const std::vector<double>& margins, const std::vector<double>& targets, double a,
                 double b) {
    double nll = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const double s = a * margins[i] + b;
        // -[t log p + (1-t) log(1-p)] with log p = -softplus(s) and
        // log(1-p) = s - softplus(s).
        nll += softplus(s) - (1.0 - targets[i]) * s;
    }
    return nll;
}

std::array<double, 2> platt_gradient(const std::vector<double>& margins,
                                     const std::vector<double>& targets, double a, double b) {
    double ga = 0.0, gb = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const double p = sigmoid_of_score(a * margins[i] + b);
        const double diff = targets[i] - p;
        ga += diff * margins[i];
        gb += diff;
    }
    return {ga, gb};
}

PlattParams platt_fit(const std::vector<double>& margins, const std::vector<int>& labels) {
    if (margins.size() != labels.size())
        throw DataError("margin and label counts differ");
    std::size_t n_pos = 0, n_neg = 0;
    for (int y : labels) {
        if (y > 0)
            ++n_pos;
        else
            ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0)
        throw DataError("calibration needs both classes, got " + std::to_string(n_pos) +
                        " positive / " + std::to_string(n_neg) + " negative");

    const double t_pos = (static_cast<double>(n_pos) + 1.0) / (static_cast<double>(n_pos) + 2.0);
    const double t_neg = 1.0 / (static_cast<double>(n_neg) + 2.0);
    std::vector<double> targets(margins.size());
    for (std::size_t i = 0; i < margins.size(); ++i) targets[i] = labels[i] > 0 ? t_pos : t_neg;

    const bool constant_margins =
        std::all_of(margins.begin(), margins.end(), [&](double m) { return m == margins[0]; });

    double a = 0.0;
    double b = std::log((static_cast<double>(n_neg) + 1.0) / (static_cast<double>(n_pos) + 1.0));
    double nll = platt_nll(margins, targets, a, b);
    for (int iter = 0; iter < 200; ++iter) {
        const auto grad = platt_gradient(margins, targets, a, b);
        double haa = 1e-12, hab = 0.0, hbb = 1e-12;
        for (std::size_t i = 0; i < margins.size(); ++i) {
            const double p = sigmoid_of_score(a * margins[i] + b);
            const double w = p * (1.0 - p);
            haa += margins[i] * margins[i] * w;
            hab += margins[i] * w;
            hbb += w;
        }
        // Newton step: theta -= H^-1 grad, damped until the NLL improves.
        double step_a, step_b;
        if (constant_margins) {
            step_a = 0.0;
            step_b = -grad[1] / hbb;
        } else {
            const double det = haa * hbb - hab * hab;
            step_a = -(hbb * grad[0] - hab * grad[1]) / det;
            step_b = -(haa * grad[1] - hab * grad[0]) / det;
        }
        if (std::abs(step_a) + std::abs(step_b) < 1e-12) break;
        double scale = 1.0;
        for (int damp = 0; damp < 40; ++damp) {
            const double na = a + scale * step_a;
            const double nb = b + scale * step_b;
            const double cand = platt_nll(margins, targets, na, nb);
            if (cand <= nll + 1e-15) {
                a = na;
                b = nb;
                nll = cand;
                break;
            }
            scale *= 0.5;
        }
        if (std::abs(grad[0]) + std::abs(grad[1]) < 1e-10) break;
    }
    return PlattParams{a, b};
}

}  // namespace jpa
