#include "commands.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>

#include "handles.hpp"
#include "util.hpp"

namespace cli {

namespace {

struct Job {
    gp_side side;
    Mesh mesh;
};

std::vector<Job> jobs_for(const RunConfig& cfg)
{
    std::vector<Job> jobs;
    for (gp_side s : cfg.sides())
        for (const Mesh& m : cfg.meshes) jobs.push_back({s, m});
    return jobs;
}

std::string mesh_label(const Mesh& m) { return std::to_string(m.n) + "x" + std::to_string(m.m); }

std::string tag(const Job& j) { return std::string(side_label(j.side)) + "_" + mesh_label(j.mesh); }

std::string context(const Job& j) { return std::string("side=") + side_label(j.side) + " mesh=" + mesh_label(j.mesh); }

std::pair<double, double> bounds(const gp_model* m, gp_side side)
{
    double lo = 0.0, hi = 0.0;
    check(gp_sigma_bounds(m, side, &lo, &hi), "volatility bounds");
    return {lo, hi};
}

std::string join_S(const std::vector<double>& S)
{
    std::ostringstream os;
    for (size_t i = 0; i < S.size(); ++i) os << (i ? "," : "") << S[i];
    return os.str();
}

// rethrow a solver failure with side/mesh context
template <class F>
void with_context(const Job& j, const std::vector<double>& S, F&& f)
{
    try {
        f();
    } catch (const SolverError& e) {
        throw SolverError(context(j) + " S=[" + join_S(S) + "]: " + e.what());
    }
}

}  // namespace

unsigned worker_count()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("GAMMA_PRICER_THREADS");
    if (!env || !*env) return hw;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("GAMMA_PRICER_THREADS must be a positive integer");
    return static_cast<unsigned>(std::min<long>(v, 4096));
}

int run_price(const RunConfig& cfg)
{
    auto jobs = jobs_for(cfg);
    std::vector<std::vector<double>> V(jobs.size());
    parallel_for(jobs.size(), worker_count(), [&](size_t i) {
        with_context(jobs[i], cfg.S, [&] {
            Model m = make_model(cfg.market, cfg.cost, jobs[i].side);
            V[i] = run_pricer(m.get(), cfg.grid(jobs[i].mesh), cfg.psor, cfg.S, true).V;
        });
    });
    std::cout << "side,mesh,S,V_model\n";
    for (size_t i = 0; i < jobs.size(); ++i)
        for (size_t s = 0; s < cfg.S.size(); ++s)
            std::cout << side_label(jobs[i].side) << ',' << mesh_label(jobs[i].mesh) << ',' << fmt6(cfg.S[s]) << ','
                      << fmt6(V[i][s]) << '\n';
    return 0;
}

int run_table(const RunConfig& cfg)
{
    auto jobs = jobs_for(cfg);
    std::mutex io;
    parallel_for(jobs.size(), worker_count(), [&](size_t i) {
        const Job& j = jobs[i];
        std::vector<std::vector<std::string>> rows;
        with_context(j, cfg.S, [&] {
            Model m = make_model(cfg.market, cfg.cost, j.side);
            auto [lo, hi] = bounds(m.get(), j.side);
            Priced p = run_pricer(m.get(), cfg.grid(j.mesh), cfg.psor, cfg.S, true);
            for (size_t s = 0; s < cfg.S.size(); ++s) {
                rows.push_back({fmt6(cfg.S[s]), fmt6(crr(cfg.market, lo, cfg.binomial_steps, cfg.S[s])), fmt6(p.V[s]),
                                fmt6(crr(cfg.market, hi, cfg.binomial_steps, cfg.S[s])), side_label(j.side),
                                mesh_label(j.mesh)});
            }
        });
        CsvWriter w(std::filesystem::path(cfg.out_dir) / ("table_" + tag(j) + ".csv"),
                    {"S", "V_bin_min", "V_model", "V_bin_max", "side", "mesh"});
        for (auto& r : rows) w.row(r);
        std::lock_guard<std::mutex> lk(io);
        std::cout << "wrote " << w.path().string() << '\n';
    });
    return 0;
}

int run_boundary(const RunConfig& cfg)
{
    auto jobs = jobs_for(cfg);
    std::mutex io;
    parallel_for(jobs.size(), worker_count(), [&](size_t i) {
        const Job& j = jobs[i];
        std::vector<std::vector<std::string>> rows;
        with_context(j, cfg.S, [&] {
            Model m = make_model(cfg.market, cfg.cost, j.side);
            auto [lo, hi] = bounds(m.get(), j.side);
            Priced p = run_pricer(m.get(), cfg.grid(j.mesh), cfg.psor, cfg.S, true);
            const int steps = cfg.binomial_steps;
            std::vector<double> t(steps), lo_sf(steps), hi_sf(steps);
            size_t count = 0;
            check(gp_crr_boundary(&cfg.market, lo, steps, t.data(), lo_sf.data(), steps, &count), "binomial boundary");
            check(gp_crr_boundary(&cfg.market, hi, steps, t.data(), hi_sf.data(), steps, &count), "binomial boundary");
            const double T = cfg.market.maturity;
            for (size_t l = 1; l < p.tau.size(); ++l) {
                double tc = T - p.tau[l];
                long bi = std::lround(tc / T * steps);
                bi = std::clamp<long>(bi, 0, steps - 1);
                rows.push_back({fmt6(tc), fmt6(p.S_f[l]), fmt6(lo_sf[bi]), fmt6(hi_sf[bi])});
            }
        });
        CsvWriter w(std::filesystem::path(cfg.out_dir) / ("boundary_" + tag(j) + ".csv"),
                    {"t", "S_f_model", "S_f_bin_sigma_min", "S_f_bin_sigma_max"});
        for (auto& r : rows) w.row(r);
        std::lock_guard<std::mutex> lk(io);
        std::cout << "wrote " << w.path().string() << '\n';
    });
    return 0;
}

int run_curves(const RunConfig& cfg)
{
    const std::filesystem::path out(cfg.out_dir);
    {
        CsvWriter w(out / "cost.csv", {"xi", "C", "C_tilde"});
        for (double xi : linspace(0.0, cfg.curves.xi_max, cfg.curves.xi_samples)) {
            double c = 0.0, ct = 0.0;
            check(gp_cost_value(&cfg.cost, xi, &c), "cost function");
            check(gp_cost_mean_value(&cfg.cost, xi, &ct), "mean value modification");
            w.row({fmt6(xi), fmt6(c), fmt6(ct)});
        }
        std::cout << "wrote " << w.path().string() << '\n';
    }
    for (gp_side side : cfg.sides()) {
        Model m = make_model(cfg.market, cfg.cost, side);
        CsvWriter w(out / (std::string("beta_") + side_label(side) + ".csv"), {"H", "beta"});
        for (double H : linspace(0.0, cfg.curves.H_max, cfg.curves.H_samples)) {
            double b = 0.0;
            check(gp_model_beta(m.get(), H, &b), "beta");
            w.row({fmt6(H), fmt6(b)});
        }
        std::cout << "wrote " << w.path().string() << '\n';
    }

    const std::vector<double> S = arange(cfg.curves.S_min, cfg.curves.S_max, cfg.curves.S_step);
    auto jobs = jobs_for(cfg);
    std::mutex io;
    parallel_for(jobs.size(), worker_count(), [&](size_t i) {
        const Job& j = jobs[i];
        std::vector<std::vector<std::string>> rows;
        with_context(j, S, [&] {
            Model m = make_model(cfg.market, cfg.cost, j.side);
            auto [lo, hi] = bounds(m.get(), j.side);
            Priced p = run_pricer(m.get(), cfg.grid(j.mesh), cfg.psor, S, true);
            for (size_t s = 0; s < S.size(); ++s)
                rows.push_back({fmt6(S[s]), fmt6(p.V[s]), fmt6(crr(cfg.market, lo, cfg.binomial_steps, S[s])),
                                fmt6(crr(cfg.market, hi, cfg.binomial_steps, S[s]))});
        });
        CsvWriter w(out / ("prices_" + tag(j) + ".csv"), {"S", "V_model", "V_bin_min", "V_bin_max"});
        for (auto& r : rows) w.row(r);
        std::lock_guard<std::mutex> lk(io);
        std::cout << "wrote " << w.path().string() << '\n';
    });
    return 0;
}

}  // namespace cli
