#pragma once

#include <cmath>

#include "hypwander/error.hpp"

namespace hypwander {

/// A certified pair lo <= hi. When `lower_known` is false the lower end carries
/// no information and `lo` is 0.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lower_known = true;

    Interval() = default;
    Interval(double lo_, double hi_, bool lower_known_ = true)
        : lo(lo_), hi(hi_), lower_known(lower_known_) {
        if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw InvalidArgument("interval requires finite lo <= hi");
    }

    static Interval upper_only(double hi) { return Interval(0.0, hi, false); }

    bool contains(double x, double slack = 0.0) const {
        if (x > hi + slack) return false;
        return !lower_known || x >= lo - slack;
    }

    double width() const { return hi - lo; }
};

}  // namespace hypwander
