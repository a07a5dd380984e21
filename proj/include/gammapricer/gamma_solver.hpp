#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "gammapricer/lcp.hpp"
#include "gammapricer/volatility.hpp"

namespace gp {

// u_i = i h, i = -n..n, tau_j = j k, j = 0..m
struct GammaGrid {
    double L = 2.5;
    int n = 250;
    int m = 200;
    double T = 1.0;
    double tau_star = 0.005;

    void validate() const;
    double h() const { return L / n; }
    double k() const { return T / m; }
    double u(int i) const { return i * h(); }
    // number of interior nodes, i = -n+1..n-1
    std::size_t interior() const { return static_cast<std::size_t>(2 * n - 1); }
};

struct GammaState {
    int level = 0;
    std::vector<double> H;  // 2n+1 values, H[0] <-> u_{-n}; H.front() = H.back() = 0
    std::vector<double> v;  // P * H on the interior
};

// Row l of  a_l H_{l-1} + b_l H_l + c_l H_{l+1} = d_l  over the interior.
struct TridiagonalSystem {
    std::vector<double> a, b, c, d;

    std::size_t size() const { return b.size(); }
    // min_l (|b_l| - |a_l| - |c_l|); >= 0 means weakly diagonally dominant
    double dominance_margin() const;
    std::vector<double> multiply(const std::vector<double>& x) const;
    std::vector<double> solve() const;  // Thomas algorithm
};

// Lower-triangular payoff matrix P_li = h E (e^{s_l} - e^{u_i})^+, sampled at
// s_l = u_{l+1}.  v = P H is the rectangle-rule option value at S_l = E e^{s_l}.
class PayoffMatrix {
public:
    PayoffMatrix(const GammaGrid& grid, double strike);

    std::size_t size() const { return eu_.size(); }
    double sample_price(std::size_t l) const { return strike_ * es_[l]; }
    double sample_log(std::size_t l) const { return s_[l]; }
    const std::vector<double>& payoff() const { return g_; }
    double entry(std::size_t l, std::size_t i) const;
    double diagonal(std::size_t l) const { return hE_ * (es_[l] - eu_[l]); }

    std::vector<double> apply(const std::vector<double>& H) const;  // O(N)
    std::vector<double> solve(const std::vector<double>& v) const;  // O(N), P^{-1} is banded
    DenseMatrix dense() const;

    // (P^{-1})_{l,l-1} and (P^{-1})_{l,l-2}; (P^{-1})_{ll} = 1 / diagonal(l)
    double inv_sub1(std::size_t l) const;
    double inv_sub2(std::size_t l) const;

    double hE() const { return hE_; }
    double exp_node(std::size_t i) const { return eu_[i]; }
    double exp_sample(std::size_t l) const { return es_[l]; }

private:
    double strike_;
    double hE_;
    std::vector<double> eu_, es_, s_, w_, g_;
};

GammaState initial_condition(const GammaGrid& grid, const MarketParams& market);

TridiagonalSystem assemble(const GammaGrid& grid, const VolatilityModel& vol, const GammaState& prev);

enum class PsorSweep {
    Factored,     // SOR over the rows of A in H, exact complementarity via banded P^{-1}
    Transformed,  // classic PSOR on the materialized P A P^{-1}
};

struct PsorOutcome {
    std::vector<double> v;
    std::vector<double> H;  // interior values, P H = v
    int sweeps = 0;
    double residual = 0.0;
};

// v >= g,  P (A H - d) >= 0,  complementary.  `g` defaults to the payoff;
// pass -inf entries to drop the constraint.
PsorOutcome psor_solve(const TridiagonalSystem& sys, const PayoffMatrix& P,
                       const std::vector<double>& prev_v, const PsorConfig& cfg,
                       PsorSweep sweep = PsorSweep::Factored);
PsorOutcome psor_solve(const TridiagonalSystem& sys, const PayoffMatrix& P,
                       const std::vector<double>& g, const std::vector<double>& prev_v,
                       const PsorConfig& cfg, PsorSweep sweep);

// max_l |min((P(A H - d))_l, (v - g)_l)| / (1 + |(P d)_l|)
double complementarity_residual(const TridiagonalSystem& sys, const PayoffMatrix& P,
                                const std::vector<double>& g, const std::vector<double>& H);

struct StepInfo {
    int sweeps = 0;
    double residual = 0.0;
};

GammaState step(const GammaState& prev, const GammaGrid& grid, const VolatilityModel& vol,
                const PayoffMatrix& P, const PsorConfig& cfg, PsorSweep sweep = PsorSweep::Factored,
                StepInfo* info = nullptr);

// V = h sum_i (S - E e^{u_i})^+ H_i over i = -n..n
double reconstruct_price(const GammaState& state, const GammaGrid& grid, double strike, double S);

double mass(const GammaState& state, const GammaGrid& grid);

struct BoundaryPoint {
    double S_f = std::numeric_limits<double>::infinity();  // +inf: no active node
    bool contiguous = true;
};

// Active nodes are in-the-money samples with v_l - g_l <= tol (1 + g_l).
BoundaryPoint exercise_boundary(const GammaState& state, const PayoffMatrix& P,
                                const std::vector<double>& g, double tol = 1e-7);

struct PricingOptions {
    bool american = true;
    PsorSweep sweep = PsorSweep::Factored;
    bool check_parabolicity = true;
};

struct PricingDiagnostics {
    double initial_mass = 0.0;
    double max_mass = 0.0;
    double max_residual = 0.0;
    double min_obstacle_gap = std::numeric_limits<double>::infinity();  // min_{j,l} v - g
    long total_sweeps = 0;
    int noncontiguous_levels = 0;
    std::vector<double> step_residuals;  // one per level j = 1..m
};

struct PricingResult {
    std::vector<double> S;
    std::vector<double> V;                    // V(0, S), i.e. tau = T
    std::vector<double> tau;                  // tau_j, j = 0..m
    std::vector<std::vector<double>> surface; // surface[j][s] = V(T - tau_j, S[s])
    std::vector<double> boundary;             // S_f(tau_j); +inf when none (always at j = 0)
    PricingDiagnostics diag;
};

PricingResult price_call(const VolatilityModel& vol, const GammaGrid& grid, const PsorConfig& cfg,
                         const std::vector<double>& S_list, const PricingOptions& opt = {});
PricingResult price_american_call(const VolatilityModel& vol, const GammaGrid& grid,
                                  const PsorConfig& cfg, const std::vector<double>& S_list);
PricingResult price_european_call(const VolatilityModel& vol, const GammaGrid& grid,
                                  const PsorConfig& cfg, const std::vector<double>& S_list);

}  // namespace gp
