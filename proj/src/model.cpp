#include "jpa/model.hpp"

#include <algorithm>
#include <cmath>

namespace jpa {

Box GroundTruthPerson::bounding_box(double pad) const {
    double lo_u = joints[0].x(), hi_u = joints[0].x();
    double lo_v = joints[0].y(), hi_v = joints[0].y();
    for (const Point2& p : joints) {
        lo_u = std::min(lo_u, p.x());
        hi_u = std::max(hi_u, p.x());
        lo_v = std::min(lo_v, p.y());
        hi_v = std::max(hi_v, p.y());
    }
    lo_u -= pad;
    lo_v -= pad;
    hi_u += pad;
    hi_v += pad;
    Box b;
    b.x0 = static_cast<int>(std::floor(lo_u));
    b.y0 = static_cast<int>(std::floor(lo_v));
    b.width = static_cast<int>(std::ceil(hi_u)) - b.x0 + 1;
    b.height = static_cast<int>(std::ceil(hi_v)) - b.y0 + 1;
    return b;
}

}  // namespace jpa
