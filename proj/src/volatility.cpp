#include "gammapricer/volatility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gammapricer/errors.hpp"

namespace gp {

namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

double side_sign(Side s) { return s == Side::Bid ? 1.0 : -1.0; }

}  // namespace

void MarketParams::validate() const
{
    auto pos = [](double x) { return x > 0.0 && std::isfinite(x); };
    auto nonneg = [](double x) { return x >= 0.0 && std::isfinite(x); };
    if (!pos(sigma)) domain_error("sigma must be > 0");
    if (!pos(strike)) domain_error("strike must be > 0");
    if (!pos(maturity)) domain_error("maturity must be > 0");
    if (!pos(dt_rehedge)) domain_error("rehedging interval must be > 0");
    if (!nonneg(r)) domain_error("r must be >= 0");
    if (!nonneg(q)) domain_error("q must be >= 0");
}

const char* side_name(Side s) { return s == Side::Bid ? "bid" : "ask"; }

VolatilityModel::VolatilityModel(const MarketParams& market, const CostModel& costs, Side side)
    : market_(market), costs_(costs), side_(side)
{
    market_.validate();
}

VolatilityModel VolatilityModel::constant(const MarketParams& market, double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) domain_error("constant volatility must be > 0");
    VolatilityModel m(market, CostModel::constant(0.0), Side::Bid);
    m.constant_ = true;
    m.sigma_const_ = sigma;
    return m;
}

double VolatilityModel::leland_number() const
{
    return kSqrt2OverPi * costs_.c0() / leland_scale();
}

double VolatilityModel::sigma_hat_squared(double H) const
{
    if (constant_) return sigma_const_ * sigma_const_;
    double s2 = market_.sigma * market_.sigma;
    if (H == 0.0) return s2;
    double scale = leland_scale();
    double ct = mean_value_analytic(costs_, scale * std::abs(H));
    return s2 * (1.0 - side_sign(side_) * kSqrt2OverPi * ct * sgn(H) / scale);
}

double VolatilityModel::beta(double H) const { return 0.5 * sigma_hat_squared(H) * H; }

double VolatilityModel::beta_prime(double H) const
{
    if (constant_) return 0.5 * sigma_const_ * sigma_const_;
    double s2 = market_.sigma * market_.sigma;
    double s = side_sign(side_);
    if (H == 0.0) {
        // right-hand limit: sigma_hat^2(0+)/2
        return 0.5 * s2 * (1.0 - s * kSqrt2OverPi * costs_.c0() / leland_scale());
    }
    double xi = leland_scale() * std::abs(H);
    // d sigma_hat^2 / dH = -s sigma^2 sqrt(2/pi) C~'(xi), for either sign of H
    double dsig = -s * s2 * kSqrt2OverPi * mean_value_analytic_derivative(costs_, xi);
    return 0.5 * sigma_hat_squared(H) + 0.5 * H * dsig;
}

std::string ParabolicityReport::summary() const
{
    std::ostringstream os;
    os << (pass ? "PASS" : "FAIL") << " min sigma_hat^2=" << min_sigma_hat_sq
       << " min beta'=" << min_beta_prime;
    if (!violations.empty()) {
        os << " violations at H=";
        std::size_t shown = std::min<std::size_t>(violations.size(), 5);
        for (std::size_t i = 0; i < shown; ++i) os << (i ? "," : "") << violations[i];
        if (violations.size() > shown) os << ",... (" << violations.size() << " total)";
    }
    return os.str();
}

ParabolicityReport validate_parabolicity(const VolatilityModel& model, double h_lo, double h_hi,
                                         int samples)
{
    if (!(h_lo <= h_hi)) domain_error("parabolicity range must be nonempty");
    if (samples < 1) samples = 1;
    ParabolicityReport rep;
    rep.min_sigma_hat_sq = std::numeric_limits<double>::infinity();
    rep.min_beta_prime = std::numeric_limits<double>::infinity();
    int count = (h_lo == h_hi) ? 1 : std::max(samples, 2);
    for (int k = 0; k < count; ++k) {
        double H = count == 1 ? h_lo : h_lo + (h_hi - h_lo) * k / (count - 1);
        double s2 = model.sigma_hat_squared(H);
        double bp = model.beta_prime(H);
        rep.min_sigma_hat_sq = std::min(rep.min_sigma_hat_sq, s2);
        rep.min_beta_prime = std::min(rep.min_beta_prime, bp);
        if (!(s2 > 0.0) || !(bp > 0.0)) rep.violations.push_back(H);
    }
    rep.pass = rep.violations.empty();
    return rep;
}

}  // namespace gp
