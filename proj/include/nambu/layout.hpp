#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace nambu {

/// Partition of a flat coordinate vector into `subsystems` blocks of equal
/// `arity`. Canonical charts use arity 2 (one (q,p) doublet per subsystem),
/// multiplet spaces use arity N.
struct Layout {
    int subsystems = 1;
    int arity = 2;

    int dim() const { return subsystems * arity; }

    bool operator==(const Layout&) const = default;
};

inline Layout doublet_layout(int subsystems) { return Layout{subsystems, 2}; }
inline Layout multiplet_layout(int subsystems, int arity) { return Layout{subsystems, arity}; }

/// A point in a laid-out phase space.
struct Point {
    std::vector<double> coords;
    Layout layout;

    Point() = default;
    Point(std::vector<double> c, Layout l) : coords(std::move(c)), layout(l) {
        if (static_cast<int>(coords.size()) != layout.dim())
            throw std::invalid_argument("point size does not match layout");
    }

    int dim() const { return static_cast<int>(coords.size()); }
    std::span<const double> view() const { return coords; }
};

} // namespace nambu
