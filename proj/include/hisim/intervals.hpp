#pragma once

#include <vector>

namespace hisim {

/// Closed interval [lo, hi]; lo == hi is a single point.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool operator==(const Interval&) const = default;
};

/// Finite union of closed intervals, kept sorted and merged.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> parts);
    static IntervalSet of(double lo, double hi);

    const std::vector<Interval>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    bool contains(double x) const;
    double measure() const;

    IntervalSet unite(const IntervalSet& o) const;
    IntervalSet intersect(const IntervalSet& o) const;
    /// Closure of this \ o.
    IntervalSet subtract(const IntervalSet& o) const;
    IntervalSet clip(double lo, double hi) const { return intersect(of(lo, hi)); }

private:
    void normalize();
    std::vector<Interval> parts_;
};

}  // namespace hisim
