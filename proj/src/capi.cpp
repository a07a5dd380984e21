#include "gammapricer.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "gammapricer/analytic.hpp"
#include "gammapricer/binomial.hpp"
#include "gammapricer/errors.hpp"
#include "gammapricer/gamma_solver.hpp"
#include "gammapricer/lcp.hpp"

struct gp_model {
    gp::VolatilityModel vol;
};

struct gp_result {
    gp::PricingResult res;
};

namespace {

thread_local std::string last_error;

// bad enum values and similar caller mistakes
struct BadArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

gp_status fail(gp_status s, const std::string& msg)
{
    last_error = msg;
    return s;
}

// run f, mapping exceptions to status codes
template <class F>
gp_status guarded(F&& f)
{
    try {
        last_error.clear();
        return f();
    } catch (const gp::Error& e) {
        switch (e.kind()) {
        case gp::ErrorKind::Domain: return fail(GP_ERR_DOMAIN, e.what());
        case gp::ErrorKind::Numeric: return fail(GP_ERR_NUMERIC, e.what());
        case gp::ErrorKind::Parabolicity: return fail(GP_ERR_PARABOLICITY, e.what());
        case gp::ErrorKind::Convergence: return fail(GP_ERR_CONVERGENCE, e.what());
        }
        return fail(GP_ERR_INTERNAL, e.what());
    } catch (const BadArgument& e) {
        return fail(GP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(GP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(GP_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(GP_ERR_INTERNAL, "unknown error");
    }
}

#define GP_REQUIRE(cond) \
    do { \
        if (!(cond)) return fail(GP_ERR_INVALID_ARGUMENT, "invalid argument: " #cond); \
    } while (0)

gp::MarketParams to_market(const gp_market& m)
{
    gp::MarketParams p;
    p.sigma = m.sigma;
    p.r = m.r;
    p.q = m.q;
    p.strike = m.strike;
    p.maturity = m.maturity;
    p.dt_rehedge = m.dt_rehedge;
    p.validate();
    return p;
}

gp::CostModel to_cost(const gp_cost& c)
{
    switch (c.kind) {
    case GP_COST_CONSTANT: return gp::CostModel::constant(c.c0);
    case GP_COST_LINEAR: return gp::CostModel::linear(c.c0, c.kappa);
    case GP_COST_PIECEWISE_LINEAR:
        return gp::CostModel::piecewise_linear({c.c0, c.kappa, c.xi_minus, c.xi_plus});
    }
    throw BadArgument("unknown cost model kind");
}

gp::Side to_side(gp_side s)
{
    if (s != GP_SIDE_BID && s != GP_SIDE_ASK) throw BadArgument("unknown side");
    return s == GP_SIDE_BID ? gp::Side::Bid : gp::Side::Ask;
}

gp::PsorConfig to_psor(const gp_psor* c)
{
    gp::PsorConfig p;
    if (c) {
        p.omega = c->omega;
        p.tol = c->tol;
        p.k_max = c->k_max;
    }
    p.validate();
    return p;
}

gp::PsorSweep to_sweep(const gp_psor* c)
{
    if (!c) return gp::PsorSweep::Factored;
    if (c->sweep == GP_SWEEP_FACTORED) return gp::PsorSweep::Factored;
    if (c->sweep == GP_SWEEP_TRANSFORMED) return gp::PsorSweep::Transformed;
    throw BadArgument("unknown PSOR sweep variant");
}

gp::GammaGrid to_grid(const gp_grid& g, double maturity)
{
    gp::GammaGrid gr;
    gr.L = g.L;
    gr.n = g.n;
    gr.m = g.m;
    gr.T = maturity;
    gr.tau_star = g.tau_star;
    gr.validate();
    return gr;
}

gp_status price(const gp_model* m, const gp_grid* g, const gp_psor* cfg, const double* S, size_t count,
                gp_result** out, bool american)
{
    GP_REQUIRE(m && g && out && (S || count == 0));
    *out = nullptr;
    return guarded([&] {
        gp::PricingOptions opt;
        opt.american = american;
        opt.sweep = to_sweep(cfg);
        auto grid = to_grid(*g, m->vol.market().maturity);
        auto res = gp::price_call(m->vol, grid, to_psor(cfg), std::vector<double>(S, S + count), opt);
        *out = new gp_result{std::move(res)};
        return GP_OK;
    });
}

gp::DenseMatrix to_dense(const double* M, size_t n)
{
    gp::DenseMatrix D(n);
    std::copy(M, M + n * n, D.a.begin());
    return D;
}

}  // namespace

extern "C" {

const char* gp_version(void) { return "1.0.0"; }

const char* gp_status_string(gp_status s)
{
    switch (s) {
    case GP_OK: return "ok";
    case GP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GP_ERR_DOMAIN: return "domain error";
    case GP_ERR_NUMERIC: return "numeric error";
    case GP_ERR_PARABOLICITY: return "parabolicity failure";
    case GP_ERR_CONVERGENCE: return "convergence failure";
    case GP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* gp_last_error(void) { return last_error.c_str(); }

void gp_market_default(gp_market* out)
{
    if (!out) return;
    gp::MarketParams p;
    *out = {p.sigma, p.r, p.q, p.strike, p.maturity, p.dt_rehedge};
}

void gp_psor_default(gp_psor* out)
{
    if (!out) return;
    gp::PsorConfig p;
    *out = {p.omega, p.tol, p.k_max, GP_SWEEP_FACTORED};
}

gp_status gp_cost_value(const gp_cost* c, double xi, double* out)
{
    GP_REQUIRE(c && out);
    return guarded([&] {
        *out = gp::cost(to_cost(*c), xi);
        return GP_OK;
    });
}

gp_status gp_cost_mean_value(const gp_cost* c, double xi, double* out)
{
    GP_REQUIRE(c && out);
    return guarded([&] {
        *out = gp::mean_value_analytic(to_cost(*c), xi);
        return GP_OK;
    });
}

gp_status gp_cost_mean_value_quadrature(const gp_cost* c, double xi, double* out)
{
    GP_REQUIRE(c && out);
    return guarded([&] {
        *out = gp::mean_value_quadrature(to_cost(*c), xi);
        return GP_OK;
    });
}

gp_status gp_cost_floor(const gp_cost* c, double* out, int* negative_flag)
{
    GP_REQUIRE(c && out);
    return guarded([&] {
        auto model = to_cost(*c);
        *out = model.floor_value();
        if (negative_flag) *negative_flag = model.negative_cost_flag() ? 1 : 0;
        return GP_OK;
    });
}

gp_status gp_model_create(const gp_market* mk, const gp_cost* c, gp_side side, gp_model** out)
{
    GP_REQUIRE(mk && c && out);
    *out = nullptr;
    return guarded([&] {
        *out = new gp_model{gp::VolatilityModel(to_market(*mk), to_cost(*c), to_side(side))};
        return GP_OK;
    });
}

gp_status gp_model_create_constant(const gp_market* mk, double sigma, gp_model** out)
{
    GP_REQUIRE(mk && out);
    *out = nullptr;
    return guarded([&] {
        *out = new gp_model{gp::VolatilityModel::constant(to_market(*mk), sigma)};
        return GP_OK;
    });
}

void gp_model_destroy(gp_model* m) { delete m; }

gp_status gp_model_sigma_hat_sq(const gp_model* m, double H, double* out)
{
    GP_REQUIRE(m && out);
    return guarded([&] {
        *out = m->vol.sigma_hat_squared(H);
        return GP_OK;
    });
}

gp_status gp_model_beta(const gp_model* m, double H, double* out)
{
    GP_REQUIRE(m && out);
    return guarded([&] {
        *out = m->vol.beta(H);
        return GP_OK;
    });
}

gp_status gp_model_beta_prime(const gp_model* m, double H, double* out)
{
    GP_REQUIRE(m && out);
    return guarded([&] {
        *out = m->vol.beta_prime(H);
        return GP_OK;
    });
}

gp_status gp_model_parabolicity(const gp_model* m, double h_lo, double h_hi, int* pass,
                                double* min_sigma_hat_sq, double* min_beta_prime)
{
    GP_REQUIRE(m && pass);
    return guarded([&] {
        auto rep = gp::validate_parabolicity(m->vol, h_lo, h_hi);
        *pass = rep.pass ? 1 : 0;
        if (min_sigma_hat_sq) *min_sigma_hat_sq = rep.min_sigma_hat_sq;
        if (min_beta_prime) *min_beta_prime = rep.min_beta_prime;
        if (!rep.pass) last_error = rep.summary();
        return GP_OK;
    });
}

gp_status gp_sigma_bounds(const gp_model* m, gp_side side, double* sigma_min, double* sigma_max)
{
    GP_REQUIRE(m && sigma_min && sigma_max);
    return guarded([&] {
        auto [lo, hi] = gp::sigma_bounds(m->vol, to_side(side));
        *sigma_min = lo;
        *sigma_max = hi;
        return GP_OK;
    });
}

gp_status gp_initial_mass(const gp_grid* g, const gp_market* mk, double* out)
{
    GP_REQUIRE(g && mk && out);
    return guarded([&] {
        auto market = to_market(*mk);
        auto grid = to_grid(*g, market.maturity);
        *out = gp::mass(gp::initial_condition(grid, market), grid);
        return GP_OK;
    });
}

gp_status gp_price_american(const gp_model* m, const gp_grid* g, const gp_psor* cfg, const double* S,
                            size_t count, gp_result** out)
{
    return price(m, g, cfg, S, count, out, true);
}

gp_status gp_price_european(const gp_model* m, const gp_grid* g, const gp_psor* cfg, const double* S,
                            size_t count, gp_result** out)
{
    return price(m, g, cfg, S, count, out, false);
}

void gp_result_destroy(gp_result* r) { delete r; }

size_t gp_result_count(const gp_result* r) { return r ? r->res.S.size() : 0; }

size_t gp_result_levels(const gp_result* r) { return r ? r->res.tau.size() : 0; }

gp_status gp_result_prices(const gp_result* r, double* V, size_t cap)
{
    GP_REQUIRE(r && V && cap >= r->res.V.size());
    std::copy(r->res.V.begin(), r->res.V.end(), V);
    return GP_OK;
}

gp_status gp_result_surface(const gp_result* r, size_t level, double* V, size_t cap)
{
    GP_REQUIRE(r && V && level < r->res.surface.size() && cap >= r->res.S.size());
    const auto& row = r->res.surface[level];
    std::copy(row.begin(), row.end(), V);
    return GP_OK;
}

gp_status gp_result_boundary(const gp_result* r, double* tau, double* S_f, size_t cap)
{
    GP_REQUIRE(r && tau && S_f && cap >= r->res.tau.size());
    std::copy(r->res.tau.begin(), r->res.tau.end(), tau);
    std::copy(r->res.boundary.begin(), r->res.boundary.end(), S_f);
    return GP_OK;
}

gp_status gp_result_diagnostics(const gp_result* r, gp_diagnostics* out)
{
    GP_REQUIRE(r && out);
    const auto& d = r->res.diag;
    *out = {d.initial_mass, d.max_mass, d.max_residual, d.min_obstacle_gap, d.total_sweeps,
            d.noncontiguous_levels};
    return GP_OK;
}

gp_status gp_result_step_residuals(const gp_result* r, double* res, size_t cap)
{
    GP_REQUIRE(r && res && cap >= r->res.diag.step_residuals.size());
    std::copy(r->res.diag.step_residuals.begin(), r->res.diag.step_residuals.end(), res);
    return GP_OK;
}

gp_status gp_crr_price(const gp_market* mk, double sigma, int steps, int american, double S0, double* out)
{
    GP_REQUIRE(mk && out);
    return guarded([&] {
        gp::TreeSpec spec{steps, american ? gp::ExerciseStyle::American : gp::ExerciseStyle::European,
                          to_market(*mk), sigma};
        *out = gp::crr_price(spec, S0, mk->strike);
        return GP_OK;
    });
}

gp_status gp_crr_boundary(const gp_market* mk, double sigma, int steps, double* t, double* S_f, size_t cap,
                          size_t* count)
{
    GP_REQUIRE(mk && (cap == 0 || (t && S_f)));
    return guarded([&] {
        gp::TreeSpec spec{steps, gp::ExerciseStyle::American, to_market(*mk), sigma};
        auto b = gp::crr_exercise_boundary(spec, mk->strike);
        for (size_t i = 0; i < std::min(cap, b.size()); ++i) {
            t[i] = b[i].t;
            S_f[i] = b[i].S_f;
        }
        if (count) *count = b.size();
        return GP_OK;
    });
}

gp_status gp_bs_call(const gp_market* mk, double sigma, double S, double t_to_expiry, double* out)
{
    GP_REQUIRE(mk && out);
    return guarded([&] {
        *out = gp::analytic_european_call(to_market(*mk), sigma, S, t_to_expiry);
        return GP_OK;
    });
}

gp_status gp_lcp_psor(const double* M, size_t n, const double* d, const double* g, const gp_psor* cfg,
                      double* x, int* sweeps)
{
    GP_REQUIRE(M && d && g && x && n > 0);
    return guarded([&] {
        auto sol = gp::psor_dense(to_dense(M, n), std::vector<double>(d, d + n), std::vector<double>(g, g + n),
                                  std::vector<double>(x, x + n), to_psor(cfg));
        std::copy(sol.x.begin(), sol.x.end(), x);
        if (sweeps) *sweeps = sol.sweeps;
        return GP_OK;
    });
}

gp_status gp_lcp_enumerate(const double* M, size_t n, const double* d, const double* g, double* x, int* found)
{
    GP_REQUIRE(M && d && g && x && found && n > 0);
    return guarded([&] {
        auto sol = gp::lcp_enumerate(to_dense(M, n), std::vector<double>(d, d + n), std::vector<double>(g, g + n));
        *found = sol ? 1 : 0;
        if (sol) std::copy(sol->begin(), sol->end(), x);
        return GP_OK;
    });
}

}  // extern "C"
