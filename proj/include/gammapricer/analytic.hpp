#pragma once

#include "gammapricer/volatility.hpp"

namespace gp {

// Black-Scholes call with continuous dividend yield q.
double analytic_european_call(const MarketParams& market, double sigma, double S, double t_to_expiry);

}  // namespace gp
