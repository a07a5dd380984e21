#include "gammapricer/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gammapricer/errors.hpp"

namespace gp {

namespace {

struct Lattice {
    double u, d, p, disc;
};

Lattice make_lattice(const TreeSpec& spec)
{
    const double dt = spec.market.maturity / spec.steps;
    Lattice l;
    l.u = std::exp(spec.sigma * std::sqrt(dt));
    l.d = 1.0 / l.u;
    l.p = (std::exp((spec.market.r - spec.market.q) * dt) - l.d) / (l.u - l.d);
    l.disc = std::exp(-spec.market.r * dt);
    if (!(l.p > 0.0 && l.p < 1.0)) {
        std::ostringstream os;
        os << "risk-neutral probability " << l.p << " outside (0,1)";
        domain_error(os.str());
    }
    return l;
}

}  // namespace

void TreeSpec::validate() const
{
    if (steps < 1) domain_error("tree steps must be >= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) domain_error("tree volatility must be > 0");
    market.validate();
}

std::pair<double, double> sigma_bounds(const VolatilityModel& vol, Side side)
{
    if (vol.is_constant()) return {vol.sigma_const(), vol.sigma_const()};
    const MarketParams& m = vol.market();
    const double rho = std::sqrt(2.0 / std::numbers::pi) / vol.leland_scale();
    const double hi = vol.costs().c0(), lo = vol.costs().floor_value();
    if (!std::isfinite(lo)) domain_error("cost model has no finite floor; volatility is unbounded");
    const double s2 = m.sigma * m.sigma;
    double a = side == Side::Bid ? s2 * (1.0 - rho * hi) : s2 * (1.0 + rho * lo);
    double b = side == Side::Bid ? s2 * (1.0 - rho * lo) : s2 * (1.0 + rho * hi);
    if (!(a > 0.0) || !(b > 0.0)) domain_error("transaction costs too large: squared volatility bound is not positive");
    return {std::sqrt(a), std::sqrt(b)};
}

double crr_price(const TreeSpec& spec, double S0, double strike)
{
    spec.validate();
    if (!(S0 > 0.0) || !(strike > 0.0)) domain_error("S0 and strike must be > 0");
    const Lattice lt = make_lattice(spec);
    const int N = spec.steps;
    const bool american = spec.style == ExerciseStyle::American;
    std::vector<double> V(N + 1);
    // node k at level t has price S0 u^{t-2k}
    for (int k = 0; k <= N; ++k) V[k] = std::max(S0 * std::pow(lt.u, N - 2 * k) - strike, 0.0);
    const double pu = lt.disc * lt.p, pd = lt.disc * (1.0 - lt.p);
    for (int t = N - 1; t >= 0; --t) {
        double S = S0 * std::pow(lt.u, t);
        const double step = lt.d * lt.d;
        for (int k = 0; k <= t; ++k) {
            double cont = pu * V[k] + pd * V[k + 1];
            V[k] = american ? std::max(cont, S - strike) : cont;
            S *= step;
        }
    }
    return V[0];
}

std::vector<TreeBoundaryPoint> crr_exercise_boundary(const TreeSpec& spec, double strike)
{
    spec.validate();
    if (spec.style != ExerciseStyle::American) domain_error("exercise boundary needs an American tree");
    if (!(strike > 0.0)) domain_error("strike must be > 0");
    const Lattice lt = make_lattice(spec);
    const int N = spec.steps;
    const int W = N;  // virtual levels before t = 0, so level 0 spans strike * u^{+-W}
    const int top = W + N;
    const double dt = spec.market.maturity / N;
    const double pu = lt.disc * lt.p, pd = lt.disc * (1.0 - lt.p);
    const double step = lt.d * lt.d;

    std::vector<double> V(top + 1);
    for (int k = 0; k <= top; ++k) V[k] = std::max(strike * std::pow(lt.u, top - 2 * k) - strike, 0.0);

    std::vector<TreeBoundaryPoint> out(N);
    for (int t = top - 1; t >= W; --t) {
        double S = strike * std::pow(lt.u, t);
        double sf = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= t; ++k) {
            double cont = pu * V[k] + pd * V[k + 1];
            double intr = S - strike;
            if (intr > 0.0 && intr >= cont) sf = S;  // k runs downward in price
            V[k] = std::max(cont, intr);
            S *= step;
        }
        out[t - W] = {(t - W) * dt, sf};
    }
    return out;
}

}  // namespace gp
