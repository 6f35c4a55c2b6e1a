#include "jpa/joints.hpp"

#include "jpa/types.hpp"

namespace jpa {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "head",    "neck",    "r_shoulder", "l_shoulder", "r_elbow", "l_elbow", "r_wrist",
    "l_wrist", "r_hip",   "l_hip",      "r_knee",     "l_knee",  "r_ankle", "l_ankle",
};

constexpr std::array<std::string_view, kPooledGroupCount> kGroupNames = {
    "head", "shoulder", "elbow", "wrist", "hip", "knee", "ankle",
};

}  // namespace

JointId joint_from_index(int index) {
    if (index < 0 || index >= kJointCount)
        throw DataError("joint index out of range: " + std::to_string(index));
    return static_cast<JointId>(index);
}

std::string_view joint_name(JointId j) { return kJointNames[joint_index(j)]; }

JointId joint_from_name(std::string_view name) {
    for (int i = 0; i < kJointCount; ++i)
        if (kJointNames[i] == name) return static_cast<JointId>(i);
    throw DataError("unknown joint name: " + std::string(name));
}

std::string_view pooled_group_name(int group) {
    if (group < 0 || group >= kPooledGroupCount)
        throw DataError("pooled group out of range: " + std::to_string(group));
    return kGroupNames[group];
}

int pooled_group(JointId j) {
    // head+neck form the first group; the remaining twelve joints pair off
    // left/right in declaration order.
    const int idx = joint_index(j);
    return idx < 2 ? 0 : (idx - 2) / 2 + 1;
}

}  // namespace jpa
