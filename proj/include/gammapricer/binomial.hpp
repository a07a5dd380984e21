#pragma once

#include <utility>
#include <vector>

#include "gammapricer/volatility.hpp"

namespace gp {

enum class ExerciseStyle { American, European };

struct TreeSpec {
    int steps = 800;
    ExerciseStyle style = ExerciseStyle::American;
    MarketParams market;
    double sigma = 0.3;  // overrides market.sigma

    void validate() const;
};

// constant volatilities bracketing sigma_hat over H >= 0
std::pair<double, double> sigma_bounds(const VolatilityModel& vol, Side side);

double crr_price(const TreeSpec& spec, double S0, double strike);

struct TreeBoundaryPoint {
    double t;    // calendar time
    double S_f;  // +inf when no node exercises
};

// Lowest in-the-money node price at which exercise is optimal, per tree level
// 0..steps-1.  The lattice is widened so every level covers the same band of
// prices around the strike.
std::vector<TreeBoundaryPoint> crr_exercise_boundary(const TreeSpec& spec, double strike);

}  // namespace gp
