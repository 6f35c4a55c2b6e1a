#include "jpa/features.hpp"

#include <cmath>

namespace jpa {

std::pair<const Detection*, const Detection*> canonical_pair(const Detection& a,
                                                             const Detection& b) {
    if (joint_index(a.joint) != joint_index(b.joint))
        return joint_index(a.joint) < joint_index(b.joint) ? std::make_pair(&a, &b)
                                                           : std::make_pair(&b, &a);
    return a.id <= b.id ? std::make_pair(&a, &b) : std::make_pair(&b, &a);
}

Vec same_type_features(const Detection& a, const Detection& b, double region_diagonal) {
    const auto [first, second] = canonical_pair(a, b);
    if (region_diagonal <= 0.0) throw DataError("region diagonal must be positive");
    const Point2 delta = second->location - first->location;
    Vec f(kSameTypeFeatureDim);
    f << delta.x(), delta.y(), std::exp(delta.x() / region_diagonal),
        std::exp(delta.y() / region_diagonal), delta.x() * delta.x(), delta.y() * delta.y();
    return f;
}

Vec diff_type_features(const Detection& a, const Detection& b, const RegionMaps& maps) {
    const auto [first, second] = canonical_pair(a, b);
    const Point2 delta = second->location - first->location;
    Vec f(kDiffTypeFeatureDim);
    f(0) = delta.x();
    f(1) = delta.y();
    f(2) = delta.norm();
    f(3) = std::atan2(delta.y(), delta.x());
    for (int c = 0; c < kChannelCount; ++c) {
        f(4 + c) = maps[c].at(first->location);
        f(4 + kChannelCount + c) = maps[c].at(second->location);
    }
    return f;
}

std::uint64_t feature_schema_hash() {
    // FNV-1a over the layout descriptor; bump the descriptor when the
    // feature composition changes so stale models are rejected on load.
    const std::string schema =
        "same:du,dv,exp(du/diag),exp(dv/diag),du^2,dv^2|"
        "diff:du,dv,norm,atan2(dv,du),scores0[15],scores1[15]";
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : schema) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace jpa
