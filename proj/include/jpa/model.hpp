#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "jpa/joints.hpp"
#include "jpa/types.hpp"

namespace jpa {

/// A joint candidate. Ids are dense integers unique within an instance;
/// locations are region-frame pixel coordinates unless stated otherwise.
struct Detection {
    int id = 0;
    JointId joint = JointId::head;
    Point2 location = Point2::Zero();
    double confidence = 0.0;
};

/// Per-channel confidence grid over a region. Rows index v, columns index u;
/// all values lie in [0, 1].
struct ScoreMap {
    int channel = 0;  // joint index, or kBackgroundChannel
    Mat values;

    int width() const { return static_cast<int>(values.cols()); }
    int height() const { return static_cast<int>(values.rows()); }

    double at(const Point2& p) const {
        const int u = static_cast<int>(std::lround(p.x()));
        const int v = static_cast<int>(std::lround(p.y()));
        if (u < 0 || v < 0 || u >= width() || v >= height())
            throw DataError("score map read out of bounds at (" + std::to_string(p.x()) + ", " +
                            std::to_string(p.y()) + ")");
        return values(v, u);
    }
};

/// The J+1 score maps of one region, indexed by channel.
using RegionMaps = std::array<ScoreMap, kChannelCount>;

struct PoseJoint {
    Point2 location = Point2::Zero();
    double confidence = 1.0;
};

/// A (possibly partial) pose: joints absent from the map are invisible or
/// truncated.
struct PersonPose {
    std::array<std::optional<PoseJoint>, kJointCount> joints;

    bool has(JointId j) const { return joints[joint_index(j)].has_value(); }
    const PoseJoint& at(JointId j) const { return *joints[joint_index(j)]; }
    void set(JointId j, Point2 location, double confidence) {
        joints[joint_index(j)] = PoseJoint{location, confidence};
    }
    int visible_count() const {
        int n = 0;
        for (const auto& e : joints) n += e.has_value() ? 1 : 0;
        return n;
    }
};

/// Ground-truth person: every joint has a location, visibility flags mark
/// occluded or truncated joints.
struct GroundTruthPerson {
    std::array<Point2, kJointCount> joints;
    std::array<bool, kJointCount> visible;

    GroundTruthPerson() {
        joints.fill(Point2::Zero());
        visible.fill(true);
    }

    /// Head-segment length, the normalization used for match radii.
    double head_length() const {
        return (joints[joint_index(JointId::head)] - joints[joint_index(JointId::neck)]).norm();
    }

    Box bounding_box(double pad = 0.0) const;
};

/// Parameters needed to re-render a scene's score maps from its ground
/// truth, so serialized scenes may omit the maps themselves.
struct RenderParams {
    double sigma = 2.0;
    double attenuation = 0.7;
    double noise_amplitude = 0.0;
};

/// A synthetic multi-person scene: ground truth, one primary region per
/// person, and the J+1 rendered score maps of every region.
struct Scene {
    int width = 0;
    int height = 0;
    std::uint64_t seed = 0;
    RenderParams render;
    std::vector<GroundTruthPerson> persons;
    std::vector<Box> regions;  // regions[i] belongs to persons[i]
    std::vector<RegionMaps> maps;
};

}  // namespace jpa
