#include "jpa/classifier.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

#include "jpa/rng.hpp"

namespace jpa {

double classifier_margin(const PairClassifier& clf, const Vec& x) {
    if (const auto* lin = std::get_if<LogisticModel>(&clf)) {
        if (lin->weights.size() != x.size())
            throw DataError("feature size " + std::to_string(x.size()) +
                            " does not match model size " + std::to_string(lin->weights.size()));
        return lin->weights.dot(x) + lin->bias;
    }
    const auto& svm = std::get<RbfSvmModel>(clf);
    if (svm.support.cols() != x.size())
        throw DataError("feature size " + std::to_string(x.size()) +
                        " does not match model size " + std::to_string(svm.support.cols()));
    double m = svm.bias;
    for (Eigen::Index i = 0; i < svm.support.rows(); ++i) {
        const double sq = (svm.support.row(i).transpose() - x).squaredNorm();
        m += svm.coeff(i) * std::exp(-svm.gamma * sq);
    }
    return m;
}

LogisticModel fit_logistic(const Mat& features, const std::vector<int>& labels, double lambda,
                           int max_iter) {
    const Eigen::Index n = features.rows();
    const Eigen::Index dim = features.cols();
    if (n != static_cast<Eigen::Index>(labels.size()))
        throw DataError("feature and label counts differ");
    if (n == 0) throw DataError("cannot fit a classifier on zero samples");

    Vec target(n);  // probabilities of the positive class
    for (Eigen::Index i = 0; i < n; ++i) target(i) = labels[i] > 0 ? 1.0 : 0.0;

    Vec w = Vec::Zero(dim);
    double bias = 0.0;
    auto nll = [&](const Vec& wv, double bv) {
        double acc = 0.5 * lambda * wv.squaredNorm();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = features.row(i).dot(wv) + bv;
            const double sp = s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
            acc += sp - target(i) * s;  // -[t s - log(1+e^s)]
        }
        return acc;
    };
    double cur = nll(w, bias);
    for (int iter = 0; iter < max_iter; ++iter) {
        Vec p(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = features.row(i).dot(w) + bias;
            p(i) = 1.0 / (1.0 + std::exp(-std::clamp(s, -40.0, 40.0)));
        }
        const Vec diff = p - target;
        Vec grad_w = features.transpose() * diff + lambda * w;
        const double grad_b = diff.sum();
        if (grad_w.cwiseAbs().maxCoeff() + std::abs(grad_b) < 1e-9) break;

        // Augmented Newton system over (w, bias).
        Vec weight = (p.array() * (1.0 - p.array())).cwiseMax(1e-10).matrix();
        Mat h(dim + 1, dim + 1);
        const Mat xw = features.array().colwise() * weight.array();
        h.topLeftCorner(dim, dim) = features.transpose() * xw;
        h.topLeftCorner(dim, dim).diagonal().array() += lambda + 1e-10;
        h.topRightCorner(dim, 1) = xw.colwise().sum().transpose();
        h.bottomLeftCorner(1, dim) = xw.colwise().sum();
        h(dim, dim) = weight.sum() + 1e-10;
        Vec grad(dim + 1);
        grad.head(dim) = grad_w;
        grad(dim) = grad_b;
        const Vec step = h.ldlt().solve(grad);

        double scale = 1.0;
        for (int damp = 0; damp < 30; ++damp) {
            const Vec wn = w - scale * step.head(dim);
            const double bn = bias - scale * step(dim);
            const double cand = nll(wn, bn);
            if (cand <= cur + 1e-15) {
                w = wn;
                bias = bn;
                cur = cand;
                break;
            }
            scale *= 0.5;
        }
    }
    return LogisticModel{w, bias};
}

RbfSvmModel fit_rbf_svm(const Mat& features, const std::vector<int>& labels, double c,
                        double gamma, std::uint64_t seed) {
    const Eigen::Index n = features.rows();
    if (n != static_cast<Eigen::Index>(labels.size()))
        throw DataError("feature and label counts differ");
    if (n == 0) throw DataError("cannot fit a classifier on zero samples");

    Mat kernel(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double k = std::exp(-gamma * (features.row(i) - features.row(j)).squaredNorm());
            kernel(i, j) = k;
            kernel(j, i) = k;
        }
    Vec y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[i] > 0 ? 1.0 : -1.0;

    Vec alpha = Vec::Zero(n);
    double bias = 0.0;
    auto decision = [&](Eigen::Index i) {
        double s = bias;
        for (Eigen::Index t = 0; t < n; ++t)
            if (alpha(t) > 0.0) s += alpha(t) * y(t) * kernel(t, i);
        return s;
    };

    std::mt19937_64 rng(mix_seed(seed, 0x5e0));
    const double tol = 1e-3;
    int passes = 0;
    const int max_passes = 5;
    int guard = 0;
    while (passes < max_passes && guard < 200) {
        ++guard;
        int changed = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ei = decision(i) - y(i);
            if (!((y(i) * ei < -tol && alpha(i) < c) || (y(i) * ei > tol && alpha(i) > 0.0)))
                continue;
            Eigen::Index j = static_cast<Eigen::Index>(uniform01(rng) * (n - 1));
            if (j >= i) ++j;
            const double ej = decision(j) - y(j);
            const double ai_old = alpha(i), aj_old = alpha(j);
            double lo, hi;
            if (y(i) != y(j)) {
                lo = std::max(0.0, aj_old - ai_old);
                hi = std::min(c, c + aj_old - ai_old);
            } else {
                lo = std::max(0.0, ai_old + aj_old - c);
                hi = std::min(c, ai_old + aj_old);
            }
            if (lo >= hi) continue;
            const double eta = 2.0 * kernel(i, j) - kernel(i, i) - kernel(j, j);
            if (eta >= 0.0) continue;
            double aj = aj_old - y(j) * (ei - ej) / eta;
            aj = std::clamp(aj, lo, hi);
            if (std::abs(aj - aj_old) < 1e-6) continue;
            const double ai = ai_old + y(i) * y(j) * (aj_old - aj);
            alpha(i) = ai;
            alpha(j) = aj;
            const double b1 = bias - ei - y(i) * (ai - ai_old) * kernel(i, i) -
                              y(j) * (aj - aj_old) * kernel(i, j);
            const double b2 = bias - ej - y(i) * (ai - ai_old) * kernel(i, j) -
                              y(j) * (aj - aj_old) * kernel(j, j);
            if (ai > 0.0 && ai < c)
                bias = b1;
            else if (aj > 0.0 && aj < c)
                bias = b2;
            else
                bias = 0.5 * (b1 + b2);
            ++changed;
        }
        passes = changed == 0 ? passes + 1 : 0;
    }

    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < n; ++i)
        if (alpha(i) > 1e-9) sv.push_back(i);
    RbfSvmModel model;
    model.gamma = gamma;
    model.bias = bias;
    model.support.resize(static_cast<Eigen::Index>(sv.size()), features.cols());
    model.coeff.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t t = 0; t < sv.size(); ++t) {
        model.support.row(static_cast<Eigen::Index>(t)) = features.row(sv[t]);
        model.coeff(static_cast<Eigen::Index>(t)) = alpha(sv[t]) * y(sv[t]);
    }
    return model;
}

}  // namespace jpa
