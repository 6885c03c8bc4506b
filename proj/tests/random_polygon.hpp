#pragma once

#include <algorithm>
#include <random>

#include "hisim/geometry.hpp"

namespace testutil {

/// Random star polygon with 1..kmax steps per quadrant satisfying the matching conditions.
inline hisim::StarPolygon random_polygon(std::mt19937_64& rng, int kmax, double scale = 2.0) {
    std::uniform_real_distribution<double> u(0.15, 1.0);
    std::uniform_int_distribution<int> kdist(1, kmax);
    const double top_up = scale * u(rng), top_down = scale * u(rng);
    const double right = scale * u(rng), left = scale * u(rng);
    hisim::StarPolygon P;
    for (hisim::Quadrant q : hisim::kQuadrants) {
        const int K = kdist(rng);
        const double X = hisim::sign_x(q) > 0 ? right : left;
        const double Y = hisim::sign_y(q) > 0 ? top_up : top_down;
        std::vector<double> xs, ys;
        for (int i = 0; i < K - 1; ++i) {
            xs.push_back(X * (0.05 + 0.9 * (u(rng) - 0.15) / 0.85));
            ys.push_back(Y * (0.05 + 0.9 * (u(rng) - 0.15) / 0.85));
        }
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end(), std::greater<>());
        xs.push_back(X);
        ys.insert(ys.begin(), Y);
        P[q] = {xs, ys};
    }
    return P;
}

}  // namespace testutil
