#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gammapricer.h"

namespace cli {

// Raised on any pricing-engine failure; maps to exit code 1.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void check(gp_status s, const std::string& context)
{
    if (s != GP_OK) throw SolverError(context + ": " + gp_status_string(s) + ": " + gp_last_error());
}

struct ModelDeleter {
    void operator()(gp_model* m) const { gp_model_destroy(m); }
};
struct ResultDeleter {
    void operator()(gp_result* r) const { gp_result_destroy(r); }
};
using Model = std::unique_ptr<gp_model, ModelDeleter>;
using Result = std::unique_ptr<gp_result, ResultDeleter>;

inline Model make_model(const gp_market& mk, const gp_cost& c, gp_side side)
{
    gp_model* m = nullptr;
    check(gp_model_create(&mk, &c, side, &m), "model");
    return Model(m);
}

inline Model make_constant_model(const gp_market& mk, double sigma)
{
    gp_model* m = nullptr;
    check(gp_model_create_constant(&mk, sigma, &m), "constant model");
    return Model(m);
}

struct Priced {
    std::vector<double> V;
    std::vector<double> tau, S_f;
    std::vector<std::vector<double>> surface;
    std::vector<double> step_residuals;
    gp_diagnostics diag{};
};

inline Priced run_pricer(const gp_model* m, const gp_grid& g, const gp_psor& cfg, const std::vector<double>& S,
                         bool american, bool want_surface = false)
{
    gp_result* raw = nullptr;
    gp_status s = american ? gp_price_american(m, &g, &cfg, S.data(), S.size(), &raw)
                           : gp_price_european(m, &g, &cfg, S.data(), S.size(), &raw);
    check(s, american ? "american pricing" : "european pricing");
    Result r(raw);
    Priced p;
    p.V.resize(gp_result_count(r.get()));
    check(gp_result_prices(r.get(), p.V.data(), p.V.size()), "prices");
    const size_t levels = gp_result_levels(r.get());
    p.tau.resize(levels);
    p.S_f.resize(levels);
    check(gp_result_boundary(r.get(), p.tau.data(), p.S_f.data(), levels), "boundary");
    check(gp_result_diagnostics(r.get(), &p.diag), "diagnostics");
    p.step_residuals.resize(levels ? levels - 1 : 0);
    check(gp_result_step_residuals(r.get(), p.step_residuals.data(), p.step_residuals.size()), "residuals");
    if (want_surface) {
        p.surface.assign(levels, std::vector<double>(S.size()));
        for (size_t j = 0; j < levels; ++j)
            check(gp_result_surface(r.get(), j, p.surface[j].data(), S.size()), "surface");
    }
    return p;
}

inline double crr(const gp_market& mk, double sigma, int steps, double S0, bool american = true)
{
    double v = 0.0;
    check(gp_crr_price(&mk, sigma, steps, american ? 1 : 0, S0, &v), "binomial tree at S=" + std::to_string(S0));
    return v;
}

}  // namespace cli
