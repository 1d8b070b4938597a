#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace exo {

// Canonical ordering of the optimizable link lengths.  A design vector holds
// either the first 6 entries (proximal-chain variables) or all 9.
inline constexpr std::array<const char*, 9> kDesignLinkNames = {
    "BC", "CD", "DE", "EF", "FG", "GH", "BK", "CI", "EJ"};

using DesignVector = std::vector<double>;  // mm, kDesignLinkNames order

struct Bound {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

struct DesignBounds {
    std::vector<Bound> b;  // one per design variable, canonical order

    std::size_t size() const { return b.size(); }
    bool contains(const DesignVector& d) const {
        if (d.size() != b.size()) return false;
        for (std::size_t i = 0; i < b.size(); ++i)
            if (d[i] < b[i].lo || d[i] > b[i].hi) return false;
        return true;
    }
    void clamp(DesignVector& d) const {
        for (std::size_t i = 0; i < b.size() && i < d.size(); ++i) {
            if (d[i] < b[i].lo) d[i] = b[i].lo;
            if (d[i] > b[i].hi) d[i] = b[i].hi;
        }
    }
};

// Default search boxes for the bundled problem (mm).
DesignBounds default_bounds_6dv();
DesignBounds default_bounds_9dv();

}  // namespace exo
