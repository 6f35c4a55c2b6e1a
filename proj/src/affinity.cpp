#include "jpa/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jpa/rng.hpp"
#include "jpa/synth.hpp"

namespace jpa {

double unary_cost(double p) {
    p = std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
    return std::log((1.0 - p) / p);
}

std::size_t type_pair_index(int a, int b) {
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= kJointCount) throw DataError("joint type out of range");
    return static_cast<std::size_t>(a) * kJointCount - static_cast<std::size_t>(a) * (a - 1) / 2 +
           (b - a);
}

const PairModel& PairwiseModel::for_types(JointId a, JointId b) const {
    const std::size_t idx = type_pair_index(joint_index(a), joint_index(b));
    if (idx >= models.size() || !models[idx])
        throw DataError("no trained model for type pair " + std::string(joint_name(a)) + "/" +
                        std::string(joint_name(b)));
    return *models[idx];
}

namespace {

std::string pair_name(int a, int b) {
    return std::string(joint_name(joint_from_index(a))) + "/" +
           std::string(joint_name(joint_from_index(b)));
}

Vec pair_features(const Detection& a, const Detection& b, const RegionMaps& maps,
                  const Box& region) {
    if (a.joint == b.joint) return same_type_features(a, b, region.diagonal());
    return diff_type_features(a, b, maps);
}

/// Raw training rows of one type-pair class.
struct ClassData {
    std::vector<Vec> rows;
    std::vector<int> labels;  // +-1
};

struct Standardizer {
    Vec mean;
    Vec stddev;

    Vec apply(const Vec& x) const { return (x - mean).cwiseQuotient(stddev); }
};

Standardizer fit_standardizer(const Mat& rows) {
    Standardizer s;
    s.mean = rows.colwise().mean().transpose();
    Vec var = Vec::Zero(rows.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const Vec d = rows.row(i).transpose() - s.mean;
        var += d.cwiseProduct(d);
    }
    var /= std::max<double>(1.0, static_cast<double>(rows.rows()));
    s.stddev = var.cwiseSqrt().cwiseMax(1e-8);
    return s;
}

}  // namespace

PairwiseModel train_pairwise(const std::vector<Scene>& scenes, const TrainingConfig& cfg) {
    if (scenes.empty()) throw DataError("training needs at least one scene");
    bool any_person = false;
    for (const Scene& s : scenes) any_person = any_person || !s.persons.empty();
    if (!any_person) throw DataError("training scenes contain no persons");

    std::vector<ClassData> classes(kTypePairCount);

    for (const Scene& scene : scenes) {
        for (std::size_t r = 0; r < scene.regions.size(); ++r) {
            const Box& region = scene.regions[r];
            const RegionMaps& maps = scene.maps[r];
            std::array<std::vector<Detection>, kJointCount> cands;
            for (int j = 0; j < kJointCount; ++j)
                cands[j] = sample_candidates(maps[j], cfg.n_candidates, cfg.nms_radius);

            // A pair is positive when one ground-truth person claims both
            // ends: each detection within the match radius of that person's
            // visible joint of the right type.
            const Point2 origin(static_cast<double>(region.x0), static_cast<double>(region.y0));
            auto matches_person = [&](const Detection& det, const GroundTruthPerson& person) {
                const int j = joint_index(det.joint);
                if (!person.visible[j]) return false;
                const double radius = cfg.match_fraction * person.head_length();
                return (det.location + origin - person.joints[j]).norm() <= radius;
            };
            auto label_pair = [&](const Detection& a, const Detection& b) {
                for (const GroundTruthPerson& person : scene.persons)
                    if (matches_person(a, person) && matches_person(b, person)) return 1;
                return -1;
            };
            auto add = [&](const Detection& a, const Detection& b) {
                ClassData& cd = classes[type_pair_index(joint_index(a.joint),
                                                        joint_index(b.joint))];
                cd.rows.push_back(pair_features(a, b, maps, region));
                cd.labels.push_back(label_pair(a, b));
            };
            for (int j1 = 0; j1 < kJointCount; ++j1) {
                for (std::size_t i = 0; i < cands[j1].size(); ++i)
                    for (std::size_t k = i + 1; k < cands[j1].size(); ++k)
                        add(cands[j1][i], cands[j1][k]);
                for (int j2 = j1 + 1; j2 < kJointCount; ++j2)
                    for (const Detection& a : cands[j1])
                        for (const Detection& b : cands[j2]) add(a, b);
            }
        }
    }

    PairwiseModel model;
    model.schema_hash = feature_schema_hash();
    model.models.resize(kTypePairCount);

    for (int j1 = 0; j1 < kJointCount; ++j1) {
        for (int j2 = j1; j2 < kJointCount; ++j2) {
            const std::size_t idx = type_pair_index(j1, j2);
            ClassData& cd = classes[idx];
            std::vector<std::size_t> pos, neg;
            for (std::size_t i = 0; i < cd.labels.size(); ++i)
                (cd.labels[i] > 0 ? pos : neg).push_back(i);
            if (pos.empty() || neg.empty())
                throw DataError("degenerate training class for pair " + pair_name(j1, j2) +
                                ": " + std::to_string(pos.size()) + " positive / " +
                                std::to_string(neg.size()) + " negative samples");

            std::mt19937_64 rng(mix_seed(cfg.seed, 0xc1a55 + idx));
            auto shuffle_ids = [&](std::vector<std::size_t>& ids) {
                for (std::size_t i = ids.size(); i > 1; --i)
                    std::swap(ids[i - 1], ids[static_cast<std::size_t>(uniform01(rng) * i)]);
            };
            shuffle_ids(pos);
            shuffle_ids(neg);
            if (cfg.balance_classes) {
                const std::size_t keep = std::min(pos.size(), neg.size());
                pos.resize(std::min(pos.size(), std::max<std::size_t>(keep, 1)));
                neg.resize(std::min(neg.size(), std::max<std::size_t>(keep, 1)));
            }
            if (pos.size() > cfg.max_pairs_per_class) pos.resize(cfg.max_pairs_per_class);
            if (neg.size() > cfg.max_pairs_per_class) neg.resize(cfg.max_pairs_per_class);

            // Stratified split; tiny classes skip the holdout and calibrate
            // on the training margins instead.
            auto split = [&](const std::vector<std::size_t>& ids) {
                std::size_t hold = static_cast<std::size_t>(
                    std::llround(cfg.holdout_fraction * static_cast<double>(ids.size())));
                if (ids.size() < 5) hold = 0;
                return std::make_pair(
                    std::vector<std::size_t>(ids.begin(), ids.end() - hold),
                    std::vector<std::size_t>(ids.end() - hold, ids.end()));
            };
            const auto [pos_train, pos_hold] = split(pos);
            const auto [neg_train, neg_hold] = split(neg);

            auto gather = [&](const std::vector<std::size_t>& a,
                              const std::vector<std::size_t>& b) {
                std::vector<std::size_t> ids = a;
                ids.insert(ids.end(), b.begin(), b.end());
                Mat x(static_cast<Eigen::Index>(ids.size()), cd.rows[0].size());
                std::vector<int> y(ids.size());
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    x.row(static_cast<Eigen::Index>(i)) = cd.rows[ids[i]].transpose();
                    y[i] = cd.labels[ids[i]];
                }
                return std::make_pair(std::move(x), std::move(y));
            };
            auto [x_train, y_train] = gather(pos_train, neg_train);
            auto [x_hold, y_hold] = gather(pos_hold, neg_hold);

            PairModel pm;
            pm.same_type = j1 == j2;
            pm.positives = static_cast<int>(pos.size());
            pm.negatives = static_cast<int>(neg.size());
            const Standardizer stz = fit_standardizer(x_train);
            pm.mean = stz.mean;
            pm.stddev = stz.stddev;
            Mat xs_train = x_train;
            for (Eigen::Index i = 0; i < xs_train.rows(); ++i)
                xs_train.row(i) = stz.apply(x_train.row(i).transpose()).transpose();

            if (cfg.classifier == "logistic") {
                pm.classifier = fit_logistic(xs_train, y_train, cfg.logistic_lambda);
            } else if (cfg.classifier == "rbf_svm") {
                Mat x_fit = xs_train;
                std::vector<int> y_fit = y_train;
                if (y_fit.size() > cfg.svm_max_samples) {
                    x_fit = xs_train.topRows(static_cast<Eigen::Index>(cfg.svm_max_samples));
                    y_fit.resize(cfg.svm_max_samples);
                }
                pm.classifier =
                    fit_rbf_svm(x_fit, y_fit, cfg.svm_c, cfg.svm_gamma, mix_seed(cfg.seed, idx));
            } else {
                throw ConfigError("unknown classifier '" + cfg.classifier + "'");
            }

            auto margins_of = [&](const Mat& x) {
                std::vector<double> ms(static_cast<std::size_t>(x.rows()));
                for (Eigen::Index i = 0; i < x.rows(); ++i)
                    ms[static_cast<std::size_t>(i)] =
                        classifier_margin(pm.classifier, stz.apply(x.row(i).transpose()));
                return ms;
            };
            const bool holdout_ok = !pos_hold.empty() && !neg_hold.empty();
            const Mat& x_cal = holdout_ok ? x_hold : x_train;
            const std::vector<int>& y_cal = holdout_ok ? y_hold : y_train;
            const std::vector<double> margins = margins_of(x_cal);
            pm.platt = platt_fit(margins, y_cal);

            int correct = 0;
            for (std::size_t i = 0; i < margins.size(); ++i)
                if ((margins[i] > 0.0) == (y_cal[i] > 0)) ++correct;
            pm.holdout_accuracy =
                margins.empty() ? 0.0 : static_cast<double>(correct) / margins.size();

            model.models[idx] = std::move(pm);
        }
    }
    return model;
}

double pairwise_probability(const PairwiseModel& model, const Detection& a, const Detection& b,
                            const RegionMaps& maps, const Box& region) {
    if (model.schema_hash != feature_schema_hash())
        throw DataError("model was built against a different feature layout");
    const auto [first, second] = canonical_pair(a, b);
    const PairModel& pm = model.for_types(first->joint, second->joint);
    const Vec f = pair_features(*first, *second, maps, region);
    const Vec fs = (f - pm.mean).cwiseQuotient(pm.stddev);
    const double margin = classifier_margin(pm.classifier, fs);
    const double p = platt_apply(pm.platt, margin);
    return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
}

AssociationInstance build_instance(const std::vector<Detection>& detections,
                                   const PairwiseModel& model, const RegionMaps& maps,
                                   const Box& region) {
    AssociationInstance inst;
    inst.detections = detections;
    for (std::size_t i = 0; i < inst.detections.size(); ++i)
        inst.detections[i].id = static_cast<int>(i);
    const int d = inst.size();
    inst.unary = Vec(d);
    for (int i = 0; i < d; ++i) inst.unary(i) = unary_cost(inst.detections[i].confidence);
    inst.pairwise = PairTable<double>(d);
    for (int i = 0; i < d; ++i) {
        for (int k = i + 1; k < d; ++k) {
            const double p =
                pairwise_probability(model, inst.detections[i], inst.detections[k], maps, region);
            inst.pairwise(i, k) = std::log((1.0 - p) / p);
        }
    }
    return inst;
}

}  // namespace jpa
