#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jpa/association.hpp"
#include "jpa/classifier.hpp"
#include "jpa/features.hpp"
#include "jpa/model.hpp"
#include "jpa/platt.hpp"

namespace jpa {

/// Confidence gate: keeps a score only when it reaches tau, else zero.
/// Idempotent, and the identity at tau = 0.
inline double threshold_confidence(double s, double tau) { return s >= tau ? s : 0.0; }

/// Log odds of a detection probability: log((1-p)/p), clamped so the cost
/// stays finite. Negative for confident detections.
double unary_cost(double p);

/// Calibrated classifier for one unordered joint-type pair.
struct PairModel {
    Vec mean;     // feature standardization
    Vec stddev;
    PairClassifier classifier;
    PlattParams platt;
    bool same_type = false;
    double holdout_accuracy = 0.0;
    int positives = 0;
    int negatives = 0;
};

/// Index of the unordered type pair (a, b) with a <= b among the
/// J + C(J,2) = 105 models.
std::size_t type_pair_index(int a, int b);
inline constexpr std::size_t kTypePairCount =
    static_cast<std::size_t>(kJointCount) * (kJointCount + 1) / 2;

/// One calibrated model per unordered joint-type pair.
struct PairwiseModel {
    std::vector<std::optional<PairModel>> models;  // kTypePairCount slots
    std::uint64_t schema_hash = 0;

    const PairModel& for_types(JointId a, JointId b) const;
};

struct TrainingConfig {
    int n_candidates = 8;  // above the solve default, so weak noise maxima
                           // enter the negative pool and the classifier
                           // learns to reject them confidently
    double nms_radius = 1.5;
    double match_fraction = 0.5;  // of GT head length, for positive labels
    double holdout_fraction = 0.2;
    std::size_t max_pairs_per_class = 4000;
    bool balance_classes = true;
    std::string classifier = "logistic";  // or "rbf_svm"
    double logistic_lambda = 1e-3;
    double svm_c = 1.0;
    double svm_gamma = 0.5;
    std::size_t svm_max_samples = 400;
    std::uint64_t seed = 1;
};

/// Trains all 105 pair models from synthetic scenes: samples candidates in
/// every region, labels each candidate pair positive when both ends land
/// within the match radius of one ground-truth person's respective joints,
/// balances classes, fits the classifier, and calibrates on a held-out
/// split. A type pair with no positives or no negatives anywhere stops
/// training with an error naming the pair.
PairwiseModel train_pairwise(const std::vector<Scene>& scenes, const TrainingConfig& cfg);

/// Calibrated probability that the two detections belong to one person.
/// Canonicalizes the pair, so argument order never matters. Output is
/// clamped inside (0,1).
double pairwise_probability(const PairwiseModel& model, const Detection& a, const Detection& b,
                            const RegionMaps& maps, const Box& region);

/// Assembles the per-person association problem from thresholded detections:
/// unary costs from detection confidences, pairwise costs from calibrated
/// pair probabilities. Detections must already have survived the confidence
/// gate; ids are reassigned densely in input order.
AssociationInstance build_instance(const std::vector<Detection>& detections,
                                   const PairwiseModel& model, const RegionMaps& maps,
                                   const Box& region);

}  // namespace jpa
