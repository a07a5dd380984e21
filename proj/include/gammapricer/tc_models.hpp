#pragma once

namespace gp {

// Piecewise-linear decreasing cost: C0 below xi_minus, slope -kappa up to
// xi_plus, flat floor C0 - kappa*(xi_plus - xi_minus) beyond.
struct PiecewiseLinearCost {
    double c0 = 0.0;
    double kappa = 0.0;
    double xi_minus = 0.0;
    double xi_plus = 0.0;

    double floor_value() const { return c0 - kappa * (xi_plus - xi_minus); }
};

class CostModel {
public:
    enum class Kind { Constant, Linear, PiecewiseLinear };

    static CostModel constant(double c0);
    static CostModel linear(double c0, double kappa);
    static CostModel piecewise_linear(const PiecewiseLinearCost& p);

    Kind kind() const { return kind_; }
    double c0() const { return c0_; }
    double kappa() const { return kappa_; }
    double xi_minus() const { return xi_minus_; }
    double xi_plus() const { return xi_plus_; }

    // infimum of C over xi >= 0 (-inf for a linear model with kappa > 0)
    double floor_value() const;
    // set when the model can produce negative costs
    bool negative_cost_flag() const { return negative_; }

private:
    CostModel() = default;

    Kind kind_ = Kind::Constant;
    double c0_ = 0.0;
    double kappa_ = 0.0;
    double xi_minus_ = 0.0;
    double xi_plus_ = 0.0;
    bool negative_ = false;
};

// standard normal cdf and upper tail, via erfc
double norm_cdf(double x);
double norm_sf(double x);

double cost(const CostModel& model, double xi);

// C~(xi) = int_0^inf C(xi x) x exp(-x^2/2) dx
double mean_value_analytic(const CostModel& model, double xi);
double mean_value_analytic_derivative(const CostModel& model, double xi);
double mean_value_quadrature(const CostModel& model, double xi, double abs_tol = 1e-10);

}  // namespace gp
