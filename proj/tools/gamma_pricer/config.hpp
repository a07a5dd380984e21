#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gammapricer.h"

namespace cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SideSel { Bid, Ask, Both };

struct Mesh {
    int n;
    int m;
};

struct CurveSpec {
    double S_min = 40.0;
    double S_max = 60.0;
    double S_step = 0.5;
    double xi_max = 0.2;
    int xi_samples = 201;
    double H_max = 40.0;
    int H_samples = 201;
};

struct RunConfig {
    gp_market market{};
    gp_cost cost{};
    SideSel side = SideSel::Both;
    double L = 2.5;
    double tau_star = 0.005;
    std::vector<Mesh> meshes;
    gp_psor psor{};
    int binomial_steps = 800;
    std::vector<double> S;
    std::string out_dir = "out";
    CurveSpec curves;

    std::vector<gp_side> sides() const;
    gp_grid grid(const Mesh& mesh) const { return gp_grid{L, mesh.n, mesh.m, tau_star}; }
};

RunConfig default_config();
// Throws ConfigError on syntax errors, unknown keys or invalid values.
RunConfig load_config(const std::string& path);
// Re-checks every invariant (used after flag overrides).
void validate(const RunConfig& cfg);

SideSel parse_side(const std::string& s);
const char* side_label(gp_side s);

}  // namespace cli
