#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gammapricer/tc_models.hpp"

namespace gp {

struct MarketParams {
    double sigma = 0.3;
    double r = 0.011;
    double q = 0.008;
    double strike = 50.0;
    double maturity = 1.0;
    double dt_rehedge = 1.0 / 261.0;

    void validate() const;
};

enum class Side { Bid, Ask };

const char* side_name(Side s);

// sigma_hat^2(H) = sigma^2 (1 - s sqrt(2/pi) C~(sigma|H|sqrt(dt)) sgn(H) / (sigma sqrt(dt)))
// with s = +1 for bid, -1 for ask.  beta(H) = sigma_hat^2(H) H / 2.
class VolatilityModel {
public:
    VolatilityModel(const MarketParams& market, const CostModel& costs, Side side);

    // frictionless model with a fixed volatility; beta(H) = sigma^2 H / 2
    static VolatilityModel constant(const MarketParams& market, double sigma);

    const MarketParams& market() const { return market_; }
    const CostModel& costs() const { return costs_; }
    Side side() const { return side_; }
    bool is_constant() const { return constant_; }
    double sigma_const() const { return sigma_const_; }

    // sigma sqrt(dt)
    double leland_scale() const { return market_.sigma * std::sqrt(market_.dt_rehedge); }
    // sqrt(2/pi) C0 / (sigma sqrt(dt))
    double leland_number() const;

    double sigma_hat_squared(double H) const;
    double beta(double H) const;
    double beta_prime(double H) const;

private:
    MarketParams market_;
    CostModel costs_;
    Side side_;
    bool constant_ = false;
    double sigma_const_ = 0.0;
};

struct ParabolicityReport {
    bool pass = true;
    double min_sigma_hat_sq = 0.0;
    double min_beta_prime = 0.0;
    std::vector<double> violations;  // H samples where either quantity is <= 0

    std::string summary() const;
};

ParabolicityReport validate_parabolicity(const VolatilityModel& model, double h_lo, double h_hi,
                                         int samples = 2001);

}  // namespace gp
