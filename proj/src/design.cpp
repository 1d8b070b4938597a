#include "exolink/design.hpp"

namespace exo {

DesignBounds default_bounds_6dv() {
    DesignBounds bounds;
    bounds.b = {
        {38.0, 60.0},   // BC
        {10.0, 30.0},   // CD
        {15.0, 51.0},   // DE
        {15.0, 51.0},   // EF
        {20.0, 56.0},   // FG
        {64.0, 100.0},  // GH
    };
    return bounds;
}

DesignBounds default_bounds_9dv() {
    DesignBounds bounds = default_bounds_6dv();
    bounds.b.push_back({20.0, 50.0});  // BK
    bounds.b.push_back({10.0, 17.0});  // CI
    bounds.b.push_back({20.0, 50.0});  // EJ
    return bounds;
}

}  // namespace exo
