#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "handles.hpp"
#include "util.hpp"

namespace cli {

namespace {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::string num(double x)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

Check measured(const std::string& name, double value, double tol)
{
    return {name, value <= tol, "measured=" + num(value) + " tol=" + num(tol)};
}

Check failed(const std::string& name, const std::string& why) { return {name, false, why}; }

const char* cost_name(gp_cost_kind k)
{
    switch (k) {
    case GP_COST_CONSTANT: return "constant";
    case GP_COST_LINEAR: return "linear";
    case GP_COST_PIECEWISE_LINEAR: return "piecewise_linear";
    }
    return "?";
}

std::vector<Check> check_parabolicity(const RunConfig& cfg)
{
    std::vector<Check> out;
    // peak of the initial Gaussian profile, doubled for headroom
    const double peak = 1.0 / (cfg.market.sigma * std::sqrt(2.0 * M_PI * cfg.tau_star));
    for (gp_side side : cfg.sides()) {
        std::string name = std::string("parabolicity ") + side_label(side);
        try {
            Model m = make_model(cfg.market, cfg.cost, side);
            int pass = 0;
            double ms = 0.0, mb = 0.0;
            check(gp_model_parabolicity(m.get(), 0.0, 2.0 * peak, &pass, &ms, &mb), "parabolicity");
            std::string detail = "H in [0," + num(2.0 * peak) + "] min sigma_hat^2=" + num(ms) + " min beta'=" + num(mb);
            out.push_back({name, pass == 1, detail});
        } catch (const SolverError& e) {
            out.push_back(failed(name, e.what()));
        }
    }
    return out;
}

std::vector<Check> check_mean_value(const RunConfig& cfg)
{
    std::vector<gp_cost> models{cfg.cost};
    const double c0 = cfg.cost.c0 > 0.0 ? cfg.cost.c0 : 0.02;
    const double kappa = cfg.cost.kind == GP_COST_CONSTANT ? 0.3 : cfg.cost.kappa;
    for (gp_cost_kind k : {GP_COST_CONSTANT, GP_COST_LINEAR, GP_COST_PIECEWISE_LINEAR}) {
        if (k == cfg.cost.kind) continue;
        gp_cost c{k, c0, kappa, 0.05, 0.1};
        if (cfg.cost.kind == GP_COST_PIECEWISE_LINEAR) c.xi_minus = cfg.cost.xi_minus, c.xi_plus = cfg.cost.xi_plus;
        models.push_back(c);
    }
    std::vector<Check> out;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> U(0.0, 10.0);
    for (const gp_cost& c : models) {
        std::string name = std::string("mean-value analytic vs quadrature (") + cost_name(c.kind) + ")";
        try {
            double worst = 0.0, floor = 0.0;
            int neg = 0;
            bool bounds_ok = true;
            check(gp_cost_floor(&c, &floor, &neg), "cost floor");
            for (int i = 0; i < 1000; ++i) {
                double xi = U(rng), a = 0.0, q = 0.0;
                check(gp_cost_mean_value(&c, xi, &a), "analytic");
                check(gp_cost_mean_value_quadrature(&c, xi, &q), "quadrature");
                worst = std::max(worst, std::abs(a - q));
                if (a > c.c0 + 1e-15 || a < floor - 1e-15) bounds_ok = false;
            }
            Check ch = measured(name, worst, 1e-8);
            ch.pass = ch.pass && bounds_ok;
            if (!bounds_ok) ch.detail += " (bounds floor <= C~ <= C0 violated)";
            out.push_back(ch);
        } catch (const SolverError& e) {
            out.push_back(failed(name, e.what()));
        }
    }
    return out;
}

Check check_leland(const RunConfig& cfg)
{
    const std::string name = "Leland reduction (kappa=0)";
    try {
        const double c0 = cfg.cost.c0;
        double xm = 0.05, xp = 0.1;
        if (cfg.cost.kind == GP_COST_PIECEWISE_LINEAR) xm = cfg.cost.xi_minus, xp = cfg.cost.xi_plus;
        gp_cost pl{GP_COST_PIECEWISE_LINEAR, c0, 0.0, xm, xp}, cst{GP_COST_CONSTANT, c0, 0.0, 0.0, 0.0};
        double worst = 0.0;
        for (gp_side side : {GP_SIDE_BID, GP_SIDE_ASK}) {
            Model a = make_model(cfg.market, pl, side), b = make_model(cfg.market, cst, side);
            for (double H : linspace(-50.0, 50.0, 1001)) {
                double x = 0.0, y = 0.0;
                check(gp_model_sigma_hat_sq(a.get(), H, &x), "sigma_hat^2");
                check(gp_model_sigma_hat_sq(b.get(), H, &y), "sigma_hat^2");
                worst = std::max(worst, std::abs(x - y));
            }
        }
        return {name, worst == 0.0, "max|diff|=" + num(worst) + " (exact equality required)"};
    } catch (const SolverError& e) {
        return failed(name, e.what());
    }
}

Check check_amster(const RunConfig& cfg)
{
    const std::string name = "Amster reduction (xi-=1e-8, xi+=1e8)";
    try {
        const double c0 = cfg.cost.c0 > 0.0 ? cfg.cost.c0 : 0.02;
        const double kappa = cfg.cost.kind == GP_COST_CONSTANT ? 0.3 : cfg.cost.kappa;
        gp_cost pl{GP_COST_PIECEWISE_LINEAR, c0, kappa, 1e-8, 1e8}, lin{GP_COST_LINEAR, c0, kappa, 0.0, 0.0};
        double worst = 0.0;
        for (double xi : linspace(0.0, 10.0, 1001)) {
            double a = 0.0, b = 0.0;
            check(gp_cost_mean_value(&pl, xi, &a), "mean value");
            check(gp_cost_mean_value(&lin, xi, &b), "mean value");
            worst = std::max(worst, std::abs(a - b));
        }
        return measured(name, worst, 1e-6);
    } catch (const SolverError& e) {
        return failed(name, e.what());
    }
}

Check check_lcp(const RunConfig& cfg)
{
    const std::string name = "PSOR vs active-set enumeration (200 tridiagonal 3x3/5x5)";
    try {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            const size_t n = t % 2 ? 5 : 3;
            std::vector<double> M(n * n, 0.0), d(n), g(n), x(n, 0.0), ref(n);
            for (size_t i = 0; i < n; ++i) {
                double lo = i > 0 ? U(rng) : 0.0, up = i + 1 < n ? U(rng) : 0.0;
                if (i > 0) M[i * n + i - 1] = lo;
                if (i + 1 < n) M[i * n + i + 1] = up;
                M[i * n + i] = std::abs(lo) + std::abs(up) + 0.5 + 0.5 * (U(rng) + 1.0);
                d[i] = U(rng);
                g[i] = 0.5 * U(rng);
            }
            int found = 0, sweeps = 0;
            check(gp_lcp_enumerate(M.data(), n, d.data(), g.data(), ref.data(), &found), "enumeration");
            if (!found) return failed(name, "enumeration found no solution for problem " + std::to_string(t));
            check(gp_lcp_psor(M.data(), n, d.data(), g.data(), &cfg.psor, x.data(), &sweeps), "dense PSOR");
            for (size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(x[i] - ref[i]));
        }
        return measured(name, worst, 1e-7);
    } catch (const SolverError& e) {
        return failed(name, e.what());
    }
}

Check check_european(const RunConfig& cfg)
{
    Mesh fine = *std::max_element(cfg.meshes.begin(), cfg.meshes.end(),
                                  [](const Mesh& a, const Mesh& b) { return a.n * a.m < b.n * b.m; });
    const std::string name = "European closed form " + std::to_string(fine.n) + "x" + std::to_string(fine.m);
    try {
        Model m = make_constant_model(cfg.market, cfg.market.sigma);
        Priced p = run_pricer(m.get(), cfg.grid(fine), cfg.psor, cfg.S, false);
        double worst = 0.0;
        for (size_t s = 0; s < cfg.S.size(); ++s) {
            double bs = 0.0;
            check(gp_bs_call(&cfg.market, cfg.market.sigma, cfg.S[s], cfg.market.maturity, &bs), "closed form");
            worst = std::max(worst, std::abs(p.V[s] - bs));
        }
        return measured(name, worst, 0.01 * cfg.market.strike);
    } catch (const SolverError& e) {
        return failed(name, e.what());
    }
}

// sandwich ordering, step residuals and the American >= European >= ... checks per (side, mesh)
std::vector<Check> check_runs(const RunConfig& cfg)
{
    struct Out {
        Check sandwich, residual, dominance;
    };
    std::vector<std::pair<gp_side, Mesh>> jobs;
    for (gp_side s : cfg.sides())
        for (const Mesh& m : cfg.meshes) jobs.push_back({s, m});
    std::vector<Out> res(jobs.size());
    parallel_for(jobs.size(), worker_count(), [&](size_t i) {
        auto [side, mesh] = jobs[i];
        std::string lbl = std::string(side_label(side)) + " " + std::to_string(mesh.n) + "x" + std::to_string(mesh.m);
        try {
            Model m = make_model(cfg.market, cfg.cost, side);
            double lo = 0.0, hi = 0.0;
            check(gp_sigma_bounds(m.get(), side, &lo, &hi), "volatility bounds");
            Priced am = run_pricer(m.get(), cfg.grid(mesh), cfg.psor, cfg.S, true, true);
            Priced eu = run_pricer(m.get(), cfg.grid(mesh), cfg.psor, cfg.S, false, true);
            double viol = 0.0;
            for (size_t s = 0; s < cfg.S.size(); ++s) {
                double bmin = crr(cfg.market, lo, cfg.binomial_steps, cfg.S[s]);
                double bmax = crr(cfg.market, hi, cfg.binomial_steps, cfg.S[s]);
                viol = std::max({viol, bmin - am.V[s], am.V[s] - bmax});
            }
            res[i].sandwich = {"sandwich " + lbl, viol <= 0.05,
                               "max excursion outside [V_bin(sigma_min), V_bin(sigma_max)]=" + num(std::max(viol, 0.0)) +
                                   " slack=5.000e-02"};
            double rmax = 0.0;
            for (double r : am.step_residuals) rmax = std::max(rmax, r);
            res[i].residual = measured("complementarity residual " + lbl, rmax, 1e-7);
            // level 0 is the smoothed initial profile, not a solved complementarity step
            double gap = 0.0;
            for (size_t j = 1; j < am.surface.size(); ++j)
                for (size_t s = 0; s < cfg.S.size(); ++s) {
                    double intr = std::max(cfg.S[s] - cfg.market.strike, 0.0);
                    gap = std::max({gap, eu.surface[j][s] - am.surface[j][s], intr - am.surface[j][s]});
                }
            res[i].dominance = measured("American >= max(European, intrinsic) " + lbl, gap, cfg.psor.tol);
        } catch (const SolverError& e) {
            res[i].sandwich = failed("sandwich " + lbl, e.what());
            res[i].residual = failed("complementarity residual " + lbl, "run failed");
            res[i].dominance = failed("American >= max(European, intrinsic) " + lbl, "run failed");
        }
    });
    std::vector<Check> out;
    for (auto& r : res) {
        out.push_back(r.sandwich);
        out.push_back(r.residual);
        out.push_back(r.dominance);
    }
    return out;
}

}  // namespace

int run_validate(const RunConfig& cfg)
{
    std::vector<Check> all;
    auto append = [&](std::vector<Check> v) { all.insert(all.end(), v.begin(), v.end()); };
    append(check_parabolicity(cfg));
    append(check_mean_value(cfg));
    all.push_back(check_leland(cfg));
    all.push_back(check_amster(cfg));
    all.push_back(check_lcp(cfg));
    all.push_back(check_european(cfg));
    append(check_runs(cfg));

    bool ok = true;
    for (const Check& c : all) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
        ok = ok && c.pass;
    }
    std::cout << (ok ? "all checks passed" : "some checks failed") << '\n';
    return ok ? 0 : 1;
}

}  // namespace cli
