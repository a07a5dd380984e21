#include "config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace cli {

namespace {

void reject_unknown(const toml::table& t, const std::string& where, const std::set<std::string>& allowed)
{
    for (const auto& [k, v] : t) {
        (void)v;
        if (!allowed.count(std::string(k.str())))
            throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where);
    }
}

const toml::table* section(const toml::table& root, const char* name)
{
    const toml::node* n = root.get(name);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(std::string("'") + name + "' must be a table");
    return n->as_table();
}

void read_num(const toml::table* t, const char* key, double& out, const std::string& where)
{
    if (!t) return;
    const toml::node* n = t->get(key);
    if (!n) return;
    if (auto v = n->value<double>()) {
        out = *v;
        return;
    }
    throw ConfigError(where + "." + key + " must be a number");
}

void read_int(const toml::table* t, const char* key, int& out, const std::string& where)
{
    if (!t) return;
    const toml::node* n = t->get(key);
    if (!n) return;
    if (auto v = n->value_exact<int64_t>()) {
        out = static_cast<int>(*v);
        return;
    }
    throw ConfigError(where + "." + key + " must be an integer");
}

void read_str(const toml::table* t, const char* key, std::string& out, const std::string& where)
{
    if (!t) return;
    const toml::node* n = t->get(key);
    if (!n) return;
    if (auto v = n->value_exact<std::string>()) {
        out = *v;
        return;
    }
    throw ConfigError(where + "." + key + " must be a string");
}

}  // namespace

std::vector<gp_side> RunConfig::sides() const
{
    switch (side) {
    case SideSel::Bid: return {GP_SIDE_BID};
    case SideSel::Ask: return {GP_SIDE_ASK};
    case SideSel::Both: break;
    }
    return {GP_SIDE_BID, GP_SIDE_ASK};
}

SideSel parse_side(const std::string& s)
{
    if (s == "bid") return SideSel::Bid;
    if (s == "ask") return SideSel::Ask;
    if (s == "both") return SideSel::Both;
    throw ConfigError("side must be one of bid, ask, both (got '" + s + "')");
}

const char* side_label(gp_side s) { return s == GP_SIDE_BID ? "bid" : "ask"; }

RunConfig default_config()
{
    RunConfig c;
    c.market = {0.3, 0.011, 0.008, 50.0, 1.0, 1.0 / 261.0};
    c.cost = {GP_COST_PIECEWISE_LINEAR, 0.02, 0.3, 0.05, 0.1};
    c.meshes = {{250, 200}, {500, 800}};
    gp_psor_default(&c.psor);
    for (int s = 40; s <= 60; s += 2) c.S.push_back(s);
    return c;
}

void validate(const RunConfig& c)
{
    gp_model* model = nullptr;
    if (gp_model_create(&c.market, &c.cost, GP_SIDE_BID, &model) != GP_OK)
        throw ConfigError(gp_last_error());
    gp_model_destroy(model);
    if (c.meshes.empty()) throw ConfigError("grid.meshes must list at least one [n, m] pair");
    for (const Mesh& mesh : c.meshes) {
        gp_grid g = c.grid(mesh);
        double mass = 0.0;
        if (gp_initial_mass(&g, &c.market, &mass) != GP_OK) throw ConfigError(gp_last_error());
    }
    if (!(c.psor.omega >= 1.0 && c.psor.omega <= 2.0)) throw ConfigError("psor.omega must lie in [1, 2]");
    if (!(c.psor.tol > 0.0)) throw ConfigError("psor.tol must be > 0");
    if (c.psor.k_max < 1) throw ConfigError("psor.k_max must be >= 1");
    if (c.binomial_steps < 1) throw ConfigError("binomial.steps must be >= 1");
    if (c.S.empty()) throw ConfigError("run.S must list at least one asset price");
    for (double s : c.S)
        if (!(s > 0.0)) throw ConfigError("run.S entries must be > 0");
    if (c.out_dir.empty()) throw ConfigError("run.out must not be empty");
    const CurveSpec& cv = c.curves;
    if (!(cv.S_min > 0.0 && cv.S_max >= cv.S_min && cv.S_step > 0.0))
        throw ConfigError("curves: need 0 < S_min <= S_max and S_step > 0");
    if (!(cv.xi_max > 0.0) || cv.xi_samples < 2) throw ConfigError("curves: need xi_max > 0, xi_samples >= 2");
    if (!(cv.H_max > 0.0) || cv.H_samples < 2) throw ConfigError("curves: need H_max > 0, H_samples >= 2");
}

RunConfig load_config(const std::string& path)
{
    toml::table root;
    try {
        root = toml::parse_file(path);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << path << ": " << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError(os.str());
    }
    RunConfig c = default_config();
    reject_unknown(root, "top level", {"market", "costs", "grid", "psor", "binomial", "run", "curves"});

    if (auto t = section(root, "market")) {
        reject_unknown(*t, "[market]", {"sigma", "r", "q", "strike", "maturity", "dt_rehedge", "rehedges_per_year"});
        read_num(t, "sigma", c.market.sigma, "market");
        read_num(t, "r", c.market.r, "market");
        read_num(t, "q", c.market.q, "market");
        read_num(t, "strike", c.market.strike, "market");
        read_num(t, "maturity", c.market.maturity, "market");
        if (t->get("dt_rehedge") && t->get("rehedges_per_year"))
            throw ConfigError("[market] give either dt_rehedge or rehedges_per_year, not both");
        read_num(t, "dt_rehedge", c.market.dt_rehedge, "market");
        if (t->get("rehedges_per_year")) {
            double per = 0.0;
            read_num(t, "rehedges_per_year", per, "market");
            if (!(per > 0.0)) throw ConfigError("market.rehedges_per_year must be > 0");
            c.market.dt_rehedge = 1.0 / per;
        }
    }
    if (auto t = section(root, "costs")) {
        reject_unknown(*t, "[costs]", {"model", "c0", "kappa", "xi_minus", "xi_plus"});
        std::string model = "piecewise_linear";
        read_str(t, "model", model, "costs");
        if (model == "constant") c.cost.kind = GP_COST_CONSTANT;
        else if (model == "linear") c.cost.kind = GP_COST_LINEAR;
        else if (model == "piecewise_linear") c.cost.kind = GP_COST_PIECEWISE_LINEAR;
        else throw ConfigError("costs.model must be constant, linear or piecewise_linear");
        read_num(t, "c0", c.cost.c0, "costs");
        read_num(t, "kappa", c.cost.kappa, "costs");
        read_num(t, "xi_minus", c.cost.xi_minus, "costs");
        read_num(t, "xi_plus", c.cost.xi_plus, "costs");
    }
    if (auto t = section(root, "grid")) {
        reject_unknown(*t, "[grid]", {"L", "tau_star", "meshes"});
        read_num(t, "L", c.L, "grid");
        read_num(t, "tau_star", c.tau_star, "grid");
        if (const toml::node* n = t->get("meshes")) {
            const toml::array* arr = n->as_array();
            if (!arr) throw ConfigError("grid.meshes must be an array of [n, m] pairs");
            c.meshes.clear();
            for (const toml::node& e : *arr) {
                const toml::array* pair = e.as_array();
                if (!pair || pair->size() != 2) throw ConfigError("grid.meshes entries must be [n, m] pairs");
                auto n_ = pair->get(0)->value_exact<int64_t>();
                auto m_ = pair->get(1)->value_exact<int64_t>();
                if (!n_ || !m_) throw ConfigError("grid.meshes entries must be integers");
                c.meshes.push_back({static_cast<int>(*n_), static_cast<int>(*m_)});
            }
        }
    }
    if (auto t = section(root, "psor")) {
        reject_unknown(*t, "[psor]", {"omega", "tol", "k_max", "sweep"});
        read_num(t, "omega", c.psor.omega, "psor");
        read_num(t, "tol", c.psor.tol, "psor");
        read_int(t, "k_max", c.psor.k_max, "psor");
        std::string sweep = "factored";
        read_str(t, "sweep", sweep, "psor");
        if (sweep == "factored") c.psor.sweep = GP_SWEEP_FACTORED;
        else if (sweep == "transformed") c.psor.sweep = GP_SWEEP_TRANSFORMED;
        else throw ConfigError("psor.sweep must be factored or transformed");
    }
    if (auto t = section(root, "binomial")) {
        reject_unknown(*t, "[binomial]", {"steps"});
        read_int(t, "steps", c.binomial_steps, "binomial");
    }
    if (auto t = section(root, "run")) {
        reject_unknown(*t, "[run]", {"side", "S", "out"});
        std::string side = "both";
        read_str(t, "side", side, "run");
        c.side = parse_side(side);
        if (const toml::node* n = t->get("S")) {
            const toml::array* arr = n->as_array();
            if (!arr) throw ConfigError("run.S must be an array of numbers");
            c.S.clear();
            for (const toml::node& e : *arr) {
                auto v = e.value<double>();
                if (!v) throw ConfigError("run.S must be an array of numbers");
                c.S.push_back(*v);
            }
        }
        read_str(t, "out", c.out_dir, "run");
    }
    if (auto t = section(root, "curves")) {
        reject_unknown(*t, "[curves]", {"S_min", "S_max", "S_step", "xi_max", "xi_samples", "H_max", "H_samples"});
        read_num(t, "S_min", c.curves.S_min, "curves");
        read_num(t, "S_max", c.curves.S_max, "curves");
        read_num(t, "S_step", c.curves.S_step, "curves");
        read_num(t, "xi_max", c.curves.xi_max, "curves");
        read_int(t, "xi_samples", c.curves.xi_samples, "curves");
        read_num(t, "H_max", c.curves.H_max, "curves");
        read_int(t, "H_samples", c.curves.H_samples, "curves");
    }
    validate(c);
    return c;
}

}  // namespace cli
