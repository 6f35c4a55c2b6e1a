#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jpa/model.hpp"

namespace jpa {

struct EvalConfig {
    double match_fraction = 0.5;    // of the GT person's head-segment length
    double min_region_area = 6400;  // persons with regions at or below are dropped

    void check() const {
        if (match_fraction <= 0.0) throw ConfigError("match fraction must be positive");
    }
};

/// Scored detections of one joint type across all scenes: (confidence,
/// matched) sorted by descending confidence, plus the recall denominator.
struct JointPR {
    int npos = 0;
    std::vector<std::pair<double, bool>> hits;
};

using PRData = std::array<JointPR, kJointCount>;

/// Greedy matching: per joint type, predictions across all scenes sorted by
/// descending confidence each claim the nearest unmatched ground-truth
/// joint of that type in their scene, within a radius scaled by that
/// person's head length. Persons whose region area is at or below the
/// minimum are dropped from both sides first.
///
/// predictions[s] must align with scenes[s].regions (one pose per region).
PRData match_and_score(const std::vector<Scene>& scenes,
                       const std::vector<std::vector<PersonPose>>& predictions,
                       const EvalConfig& cfg);

/// Area under the precision-recall curve by all-points interpolation
/// (precision envelope over recall increments). Without any ground truth
/// the value is undefined and the optional is empty.
std::optional<double> average_precision(const JointPR& pr);

/// Pooled result table: left/right joints merge into seven body groups (the
/// head group pools head and neck) by concatenating their PR data before
/// the AP computation; the total is the mean over defined groups.
struct Report {
    std::string setting;
    std::array<std::optional<double>, kPooledGroupCount> groups;
    std::optional<double> total;
    double median_solve_ms = 0.0;
    std::vector<std::string> warnings;  // groups excluded for missing GT
};

Report map_report(const PRData& pr);

/// CSV with one row per report:
/// setting,head,shoulder,elbow,wrist,hip,knee,ankle,total,median_solve_ms
std::string report_csv(const std::vector<Report>& rows);

/// Human-readable table of the same numbers.
std::string report_pretty(const Report& report);

}  // namespace jpa
