#include "jpa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "jpa/joints.hpp"

namespace jpa {

namespace {

struct Entry {
    double confidence;
    int scene;
    int person;
    Point2 location;
};

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

}  // namespace

PRData match_and_score(const std::vector<Scene>& scenes,
                       const std::vector<std::vector<PersonPose>>& predictions,
                       const EvalConfig& cfg) {
    cfg.check();
    if (predictions.size() != scenes.size())
        throw DataError("prediction count does not match scene count");
    for (std::size_t s = 0; s < scenes.size(); ++s) {
        if (predictions[s].size() != scenes[s].persons.size())
            throw DataError("pose count does not match person count in scene " +
                            std::to_string(s));
    }

    // Small-person filter removes the person and its aligned prediction.
    std::vector<std::vector<bool>> kept(scenes.size());
    for (std::size_t s = 0; s < scenes.size(); ++s) {
        kept[s].resize(scenes[s].persons.size());
        for (std::size_t p = 0; p < scenes[s].persons.size(); ++p)
            kept[s][p] = scenes[s].regions[p].area() > cfg.min_region_area;
    }

    PRData data;
    for (int j = 0; j < kJointCount; ++j) {
        JointPR& pr = data[j];
        std::vector<Entry> entries;
        std::vector<std::vector<bool>> claimed(scenes.size());
        for (std::size_t s = 0; s < scenes.size(); ++s) {
            claimed[s].assign(scenes[s].persons.size(), false);
            for (std::size_t p = 0; p < scenes[s].persons.size(); ++p) {
                if (!kept[s][p]) continue;
                if (scenes[s].persons[p].visible[j]) ++pr.npos;
                const PersonPose& pose = predictions[s][p];
                if (pose.has(JointId(j)))
                    entries.push_back({pose.at(JointId(j)).confidence, int(s), int(p),
                                       pose.at(JointId(j)).location});
            }
        }
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            if (a.confidence != b.confidence) return a.confidence > b.confidence;
            if (a.scene != b.scene) return a.scene < b.scene;
            return a.person < b.person;
        });

        for (const Entry& e : entries) {
            const Scene& scene = scenes[e.scene];
            int best = -1;
            double best_dist = 0.0;
            for (std::size_t p = 0; p < scene.persons.size(); ++p) {
                if (!kept[e.scene][p] || claimed[e.scene][p]) continue;
                const GroundTruthPerson& gt = scene.persons[p];
                if (!gt.visible[j]) continue;
                const double dist = (e.location - gt.joints[j]).norm();
                if (dist > cfg.match_fraction * gt.head_length()) continue;
                if (best < 0 || dist < best_dist) {
                    best = int(p);
                    best_dist = dist;
                }
            }
            if (best >= 0) claimed[e.scene][best] = true;
            pr.hits.emplace_back(e.confidence, best >= 0);
        }
    }
    return data;
}

std::optional<double> average_precision(const JointPR& pr) {
    if (pr.npos == 0) return std::nullopt;
    const std::size_t n = pr.hits.size();
    std::vector<double> precision(n);
    int tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pr.hits[i].second) ++tp;
        precision[i] = double(tp) / double(i + 1);
    }
    // Precision envelope: best precision at this recall level or beyond.
    for (std::size_t i = n; i-- > 1;)
        precision[i - 1] = std::max(precision[i - 1], precision[i]);
    // One division at the end keeps a perfect run at exactly 1.
    double ap = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (pr.hits[i].second) ap += precision[i];
    return ap / double(pr.npos);
}

Report map_report(const PRData& pr) {
    Report report;
    std::array<std::optional<double>, kPooledGroupCount>& groups = report.groups;
    double sum = 0.0;
    int defined = 0;
    for (int g = 0; g < kPooledGroupCount; ++g) {
        JointPR pooled;
        for (int j = 0; j < kJointCount; ++j) {
            if (pooled_group(JointId(j)) != g) continue;
            pooled.npos += pr[j].npos;
            pooled.hits.insert(pooled.hits.end(), pr[j].hits.begin(), pr[j].hits.end());
        }
        std::stable_sort(pooled.hits.begin(), pooled.hits.end(),
                         [](const std::pair<double, bool>& a, const std::pair<double, bool>& b) {
                             return a.first > b.first;
                         });
        groups[g] = average_precision(pooled);
        if (groups[g]) {
            sum += *groups[g];
            ++defined;
        } else {
            report.warnings.push_back("no ground truth for group " +
                                      std::string(pooled_group_name(g)) +
                                      ", excluded from total");
        }
    }
    if (defined > 0) report.total = sum / defined;
    return report;
}

std::string report_csv(const std::vector<Report>& rows) {
    std::string out = "setting,head,shoulder,elbow,wrist,hip,knee,ankle,total,median_solve_ms\n";
    for (const Report& r : rows) {
        out += r.setting;
        for (int g = 0; g < kPooledGroupCount; ++g) {
            out += ',';
            if (r.groups[g]) out += format_double("%.6f", *r.groups[g]);
        }
        out += ',';
        if (r.total) out += format_double("%.6f", *r.total);
        out += ',';
        out += format_double("%.3f", r.median_solve_ms);
        out += '\n';
    }
    return out;
}

std::string report_pretty(const Report& report) {
    std::string out = "setting: " + report.setting + "\n";
    for (int g = 0; g < kPooledGroupCount; ++g) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "  %-8s ", std::string(pooled_group_name(g)).c_str());
        out += buf;
        out += report.groups[g] ? format_double("%6.2f", *report.groups[g] * 100.0) : "     -";
        out += '\n';
    }
    out += "  total    ";
    out += report.total ? format_double("%6.2f", *report.total * 100.0) : "     -";
    out += '\n';
    out += "  median solve ms: " + format_double("%.3f", report.median_solve_ms) + "\n";
    for (const std::string& w : report.warnings) out += "  warning: " + w + "\n";
    return out;
}

}  // namespace jpa
