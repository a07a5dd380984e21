#include "gammapricer/tc_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gammapricer/errors.hpp"

namespace gp {

namespace {

constexpr double kSqrt2Pi = 2.506628274631000502415765284811;  // sqrt(2 pi)
constexpr double kSqrtHalfPi = 1.253314137315500251207882642406;  // sqrt(pi/2)

// x exp(-x^2/2), safe for huge x
double xgauss(double x)
{
    if (!(x < 40.0)) return 0.0;
    return x * std::exp(-0.5 * x * x);
}

void check_xi(double xi)
{
    if (!(xi >= 0.0)) domain_error("transaction-cost argument xi must be >= 0");
}

}  // namespace

CostModel CostModel::constant(double c0)
{
    if (!(c0 >= 0.0) || !std::isfinite(c0)) domain_error("constant cost requires c0 >= 0");
    CostModel m;
    m.kind_ = Kind::Constant;
    m.c0_ = c0;
    return m;
}

CostModel CostModel::linear(double c0, double kappa)
{
    if (!(c0 > 0.0) || !std::isfinite(c0)) domain_error("linear cost requires c0 > 0");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) domain_error("linear cost requires kappa >= 0");
    CostModel m;
    m.kind_ = Kind::Linear;
    m.c0_ = c0;
    m.kappa_ = kappa;
    m.negative_ = kappa > 0.0;
    return m;
}

CostModel CostModel::piecewise_linear(const PiecewiseLinearCost& p)
{
    if (!(p.c0 > 0.0) || !std::isfinite(p.c0)) domain_error("piecewise-linear cost requires c0 > 0");
    if (!(p.kappa >= 0.0) || !std::isfinite(p.kappa))
        domain_error("piecewise-linear cost requires kappa >= 0");
    if (!(p.xi_minus > 0.0) || !(p.xi_minus <= p.xi_plus) || !std::isfinite(p.xi_plus))
        domain_error("piecewise-linear cost requires 0 < xi_minus <= xi_plus");
    CostModel m;
    m.kind_ = Kind::PiecewiseLinear;
    m.c0_ = p.c0;
    m.kappa_ = p.kappa;
    m.xi_minus_ = p.xi_minus;
    m.xi_plus_ = p.xi_plus;
    m.negative_ = p.floor_value() < 0.0;
    return m;
}

double CostModel::floor_value() const
{
    switch (kind_) {
    case Kind::Constant: return c0_;
    case Kind::Linear: return kappa_ > 0.0 ? -std::numeric_limits<double>::infinity() : c0_;
    case Kind::PiecewiseLinear: return c0_ - kappa_ * (xi_plus_ - xi_minus_);
    }
    return c0_;
}

double norm_sf(double x) { return 0.5 * std::erfc(x * std::numbers::sqrt2 * 0.5); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 * 0.5); }

double cost(const CostModel& model, double xi)
{
    check_xi(xi);
    switch (model.kind()) {
    case CostModel::Kind::Constant: return model.c0();
    case CostModel::Kind::Linear: return model.c0() - model.kappa() * xi;
    case CostModel::Kind::PiecewiseLinear:
        if (xi <= model.xi_minus()) return model.c0();
        if (xi >= model.xi_plus()) return model.floor_value();
        return model.c0() - model.kappa() * (xi - model.xi_minus());
    }
    return model.c0();
}

namespace {

// int_a^b e^{-u^2/2} du for 0 <= a <= b; erf near the origin, tails further out
double gauss_integral(double a, double b)
{
    if (a >= 1.0) return kSqrt2Pi * (norm_sf(a) - norm_sf(b));
    return kSqrtHalfPi * (std::erf(b / std::numbers::sqrt2) - std::erf(a / std::numbers::sqrt2));
}

// int_a^b e^{-u^2/2} du - b e^{-b^2/2} + a e^{-a^2/2}; the series avoids cancellation for small b
double gauss_integral_less_endpoints(double a, double b)
{
    if (b >= 0.5) return gauss_integral(a, b) - xgauss(b) + xgauss(a);
    // sum_k (-1/2)^k / k! * (-2k / (2k+1)) * (b^{2k+1} - a^{2k+1})
    double sum = 0.0, coef = 1.0, pa = a, pb = b;
    for (int k = 1; k <= 20; ++k) {
        coef *= -0.5 / k;
        pa *= a * a;
        pb *= b * b;
        sum += coef * (-2.0 * k / (2.0 * k + 1.0)) * (pb - pa);
    }
    return sum;
}

}  // namespace

double mean_value_analytic(const CostModel& model, double xi)
{
    check_xi(xi);
    switch (model.kind()) {
    case CostModel::Kind::Constant: return model.c0();
    case CostModel::Kind::Linear: return model.c0() - kSqrtHalfPi * model.kappa() * xi;
    case CostModel::Kind::PiecewiseLinear: {
        if (xi == 0.0) return model.c0();
        double I = gauss_integral(model.xi_minus() / xi, model.xi_plus() / xi);
        return model.c0() - model.kappa() * xi * I;
    }
    }
    return model.c0();
}

double mean_value_analytic_derivative(const CostModel& model, double xi)
{
    check_xi(xi);
    switch (model.kind()) {
    case CostModel::Kind::Constant: return 0.0;
    case CostModel::Kind::Linear: return -kSqrtHalfPi * model.kappa();
    case CostModel::Kind::PiecewiseLinear: {
        if (xi == 0.0) return 0.0;
        return -model.kappa() * gauss_integral_less_endpoints(model.xi_minus() / xi, model.xi_plus() / xi);
    }
    }
    return 0.0;
}

double mean_value_quadrature(const CostModel& model, double xi, double abs_tol)
{
    check_xi(xi);
    // beyond x = 40 the weight x e^{-x^2/2} is below 1e-340
    constexpr double kCut = 40.0;
    std::vector<double> cuts{0.0};
    if (xi > 0.0 && model.kind() == CostModel::Kind::PiecewiseLinear) {
        for (double b : {model.xi_minus() / xi, model.xi_plus() / xi})
            if (b > cuts.back() && b < kCut) cuts.push_back(b);
    }
    cuts.push_back(kCut);

    auto f = [&](double x) { return cost(model, xi * x) * x * std::exp(-0.5 * x * x); };
    double total = 0.0, err_total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        double err = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, cuts[p], cuts[p + 1], 12, 1e-12, &err);
        err_total += err;
    }
    if (!std::isfinite(total) || err_total > abs_tol) {
        std::ostringstream os;
        os << "mean-value quadrature did not converge at xi=" << xi << " (error estimate "
           << err_total << ")";
        throw Error(ErrorKind::Numeric, os.str(), err_total);
    }
    return total;
}

}  // namespace gp
