#pragma once

#include <array>
#include <string>
#include <string_view>

namespace jpa {

inline constexpr int kJointCount = 14;

/// Score-map channel index of the background map (the J joint maps occupy
/// channels [0, kJointCount)).
inline constexpr int kBackgroundChannel = kJointCount;
inline constexpr int kChannelCount = kJointCount + 1;

enum class JointId : int {
    head = 0,
    neck,
    r_shoulder,
    l_shoulder,
    r_elbow,
    l_elbow,
    r_wrist,
    l_wrist,
    r_hip,
    l_hip,
    r_knee,
    l_knee,
    r_ankle,
    l_ankle,
};

inline int joint_index(JointId j) { return static_cast<int>(j); }
JointId joint_from_index(int index);

std::string_view joint_name(JointId j);

/// Parses a joint name as written by joint_name(). Throws DataError on
/// unknown names.
JointId joint_from_name(std::string_view name);

/// Report columns pool the fourteen joints into the seven body groups used
/// by the result tables (head pools head+neck, the rest pool left/right).
inline constexpr int kPooledGroupCount = 7;

std::string_view pooled_group_name(int group);

/// Group index in [0, kPooledGroupCount) of a joint.
int pooled_group(JointId j);

}  // namespace jpa
