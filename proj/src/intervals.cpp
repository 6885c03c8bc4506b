#include "hisim/intervals.hpp"

#include <algorithm>

namespace hisim {

IntervalSet::IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts)) { normalize(); }

IntervalSet IntervalSet::of(double lo, double hi) { return lo <= hi ? IntervalSet({{lo, hi}}) : IntervalSet(); }

void IntervalSet::normalize() {
    std::erase_if(parts_, [](const Interval& i) { return !(i.lo <= i.hi); });
    std::sort(parts_.begin(), parts_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const Interval& i : parts_) {
        if (!out.empty() && i.lo <= out.back().hi)
            out.back().hi = std::max(out.back().hi, i.hi);
        else
            out.push_back(i);
    }
    parts_ = std::move(out);
}

bool IntervalSet::contains(double x) const {
    return std::any_of(parts_.begin(), parts_.end(), [x](const Interval& i) { return i.contains(x); });
}

double IntervalSet::measure() const {
    double m = 0.0;
    for (const Interval& i : parts_) m += i.length();
    return m;
}

IntervalSet IntervalSet::unite(const IntervalSet& o) const {
    std::vector<Interval> all = parts_;
    all.insert(all.end(), o.parts_.begin(), o.parts_.end());
    return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const {
    std::vector<Interval> out;
    for (const Interval& a : parts_)
        for (const Interval& b : o.parts_) {
            const double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
            if (lo <= hi) out.push_back({lo, hi});
        }
    return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::subtract(const IntervalSet& o) const {
    std::vector<Interval> cur = parts_;
    for (const Interval& b : o.parts_) {
        std::vector<Interval> next;
        for (const Interval& a : cur) {
            if (b.hi <= a.lo || b.lo >= a.hi) {
                // Touching at one point removes nothing of positive length.
                if (!(b.lo <= a.lo && a.hi <= b.hi)) next.push_back(a);
                continue;
            }
            if (a.lo < b.lo) next.push_back({a.lo, b.lo});
            if (b.hi < a.hi) next.push_back({b.hi, a.hi});
        }
        cur = std::move(next);
    }
    return IntervalSet(std::move(cur));
}

}  // namespace hisim
