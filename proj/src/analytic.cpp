#include "gammapricer/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "gammapricer/errors.hpp"
#include "gammapricer/tc_models.hpp"

namespace gp {

double analytic_european_call(const MarketParams& m, double sigma, double S, double t)
{
    if (!(sigma > 0.0)) domain_error("volatility must be > 0");
    if (!(t >= 0.0)) domain_error("time to expiry must be >= 0");
    if (!(S >= 0.0)) domain_error("asset price must be >= 0");
    if (t == 0.0 || S == 0.0) return std::max(S - m.strike, 0.0);
    const double sq = sigma * std::sqrt(t);
    const double d1 = (std::log(S / m.strike) + (m.r - m.q + 0.5 * sigma * sigma) * t) / sq;
    const double d2 = d1 - sq;
    return S * std::exp(-m.q * t) * norm_cdf(d1) - m.strike * std::exp(-m.r * t) * norm_cdf(d2);
}

}  // namespace gp
