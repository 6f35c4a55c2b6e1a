#include "doctest.h"

#include "jpa/joints.hpp"
#include "jpa/model.hpp"
#include "jpa/types.hpp"

using namespace jpa;

TEST_SUITE("model") {

TEST_CASE("joint names round-trip through index and name") {
    for (int i = 0; i < kJointCount; ++i) {
        const JointId j = joint_from_index(i);
        CHECK(joint_index(j) == i);
        CHECK(joint_from_name(joint_name(j)) == j);
    }
    CHECK(joint_name(JointId::head) == "head");
    CHECK(joint_name(JointId::l_ankle) == "l_ankle");
    CHECK_THROWS_AS(joint_from_name("elbow"), DataError);
    CHECK_THROWS_AS(joint_from_name(""), DataError);
    CHECK_THROWS_AS(joint_from_index(kJointCount), DataError);
    CHECK_THROWS_AS(joint_from_index(-1), DataError);
}

TEST_CASE("pooled groups merge head with neck and left with right") {
    CHECK(pooled_group(JointId::head) == 0);
    CHECK(pooled_group(JointId::neck) == 0);
    CHECK(pooled_group(JointId::r_shoulder) == pooled_group(JointId::l_shoulder));
    CHECK(pooled_group(JointId::r_ankle) == pooled_group(JointId::l_ankle));
    CHECK(pooled_group(JointId::l_ankle) == kPooledGroupCount - 1);

    // Every group receives exactly two joints.
    std::array<int, kPooledGroupCount> members{};
    for (int i = 0; i < kJointCount; ++i) members[pooled_group(joint_from_index(i))]++;
    for (int n : members) CHECK(n == 2);

    CHECK(pooled_group_name(0) == "head");
    CHECK(pooled_group_name(1) == "shoulder");
    CHECK(pooled_group_name(6) == "ankle");
    CHECK_THROWS_AS(pooled_group_name(7), DataError);
}

TEST_CASE("packed pair table indexing is dense and symmetric") {
    CHECK(pair_count(4) == 6);
    CHECK(pair_count(1) == 0);
    CHECK(pair_count(0) == 0);
    // Canonical packed order over n = 4.
    CHECK(pair_index(4, 0, 1) == 0);
    CHECK(pair_index(4, 0, 2) == 1);
    CHECK(pair_index(4, 0, 3) == 2);
    CHECK(pair_index(4, 1, 2) == 3);
    CHECK(pair_index(4, 1, 3) == 4);
    CHECK(pair_index(4, 2, 3) == 5);

    PairTable<double> t(4);
    CHECK(t.size() == 4);
    CHECK(t.pairs() == 6);
    t(1, 3) = 2.5;
    CHECK(t(3, 1) == 2.5);
    CHECK(t.packed()[pair_index(4, 1, 3)] == 2.5);
    CHECK_THROWS_AS(t(2, 2), DataError);
    CHECK_THROWS_AS(t(0, 4), DataError);
    CHECK_THROWS_AS(t(-1, 0), DataError);
}

TEST_CASE("box geometry") {
    const Box b{10, 20, 30, 40};
    CHECK(b.area() == 1200.0);
    CHECK(b.diagonal() == doctest::Approx(50.0));
    CHECK(b.contains(Point2(10.0, 20.0)));
    CHECK(b.contains(Point2(39.9, 59.9)));
    CHECK_FALSE(b.contains(Point2(40.0, 20.0)));
    CHECK_FALSE(b.contains(Point2(9.9, 30.0)));
}

TEST_CASE("score map reads round to the nearest pixel and reject out-of-range points") {
    ScoreMap m;
    m.values = Mat::Zero(4, 6);
    m.values(2, 5) = 0.75;
    CHECK(m.width() == 6);
    CHECK(m.height() == 4);
    CHECK(m.at(Point2(5.0, 2.0)) == 0.75);
    CHECK(m.at(Point2(4.6, 2.4)) == 0.75);  // rounds to (5, 2)
    CHECK(m.at(Point2(0.2, 0.2)) == 0.0);
    CHECK_THROWS_AS(m.at(Point2(6.0, 0.0)), DataError);
    CHECK_THROWS_AS(m.at(Point2(0.0, -1.0)), DataError);
}

TEST_CASE("pose joints are optional per type") {
    PersonPose pose;
    CHECK(pose.visible_count() == 0);
    CHECK_FALSE(pose.has(JointId::head));
    pose.set(JointId::head, Point2(3.0, 4.0), 0.9);
    pose.set(JointId::l_wrist, Point2(1.0, 1.0), 0.5);
    CHECK(pose.visible_count() == 2);
    CHECK(pose.has(JointId::head));
    CHECK_FALSE(pose.has(JointId::r_wrist));
    CHECK(pose.at(JointId::head).location.x() == 3.0);
    CHECK(pose.at(JointId::head).confidence == 0.9);
}

TEST_CASE("ground-truth head length and bounding box") {
    GroundTruthPerson gt;
    gt.joints[joint_index(JointId::head)] = Point2(100.0, 100.0);
    gt.joints[joint_index(JointId::neck)] = Point2(100.0, 130.0);
    CHECK(gt.head_length() == doctest::Approx(30.0));

    for (int i = 2; i < kJointCount; ++i) gt.joints[i] = Point2(90.0 + i, 140.0 + i);
    const Box b = gt.bounding_box(2.0);
    for (const Point2& p : gt.joints) CHECK(b.contains(p));
    CHECK(b.x0 <= 90);
    CHECK(b.y0 <= 98);
}

}  // TEST_SUITE
