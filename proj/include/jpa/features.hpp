#pragma once

#include <cstdint>
#include <string>

#include "jpa/model.hpp"
#include "jpa/types.hpp"

namespace jpa {

inline constexpr int kSameTypeFeatureDim = 6;
inline constexpr int kDiffTypeFeatureDim = 4 + 2 * kChannelCount;  // 34

/// Puts a detection pair into canonical order: ascending joint index, then
/// ascending id. All pair features and pair models use this order, which is
/// what makes pairwise costs structurally symmetric.
std::pair<const Detection*, const Detection*> canonical_pair(const Detection& a,
                                                             const Detection& b);

/// Features of a same-type pair: the raw offset, its componentwise
/// exponential (offset first normalized by the region diagonal, else the
/// exponential overflows), and the squared offset.
Vec same_type_features(const Detection& a, const Detection& b, double region_diagonal);

/// Features of a different-type pair: raw offset, its length, the
/// full-quadrant angle atan2(dv, du), and the score vectors of all
/// channels read at both locations.
Vec diff_type_features(const Detection& a, const Detection& b, const RegionMaps& maps);

/// Stable hash of the feature layout. Serialized models carry it; loading
/// a model built against a different layout is refused.
std::uint64_t feature_schema_hash();

}  // namespace jpa
