#include "gammapricer/gamma_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gammapricer/errors.hpp"

namespace gp {

void GammaGrid::validate() const
{
    if (!(L > 0.0) || !std::isfinite(L)) domain_error("grid truncation L must be > 0");
    if (n < 2) domain_error("grid half node count n must be >= 2");
    if (m < 1) domain_error("grid time steps m must be >= 1");
    if (!(T > 0.0) || !std::isfinite(T)) domain_error("grid horizon T must be > 0");
    if (!(tau_star > 0.0) || !(tau_star < T)) domain_error("tau_star must satisfy 0 < tau_star < T");
}

// ---------------------------------------------------------------- system

double TridiagonalSystem::dominance_margin() const
{
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < b.size(); ++l) {
        double off = (l > 0 ? std::abs(a[l]) : 0.0) + (l + 1 < b.size() ? std::abs(c[l]) : 0.0);
        m = std::min(m, std::abs(b[l]) - off);
    }
    return m;
}

std::vector<double> TridiagonalSystem::multiply(const std::vector<double>& x) const
{
    const std::size_t N = b.size();
    std::vector<double> y(N);
    for (std::size_t l = 0; l < N; ++l) {
        double s = b[l] * x[l];
        if (l > 0) s += a[l] * x[l - 1];
        if (l + 1 < N) s += c[l] * x[l + 1];
        y[l] = s;
    }
    return y;
}

std::vector<double> TridiagonalSystem::solve() const
{
    const std::size_t N = b.size();
    std::vector<double> cp(N), dp(N), x(N);
    double den = b[0];
    if (den == 0.0) throw Error(ErrorKind::Numeric, "zero pivot in tridiagonal solve");
    cp[0] = N > 1 ? c[0] / den : 0.0;
    dp[0] = d[0] / den;
    for (std::size_t l = 1; l < N; ++l) {
        den = b[l] - a[l] * cp[l - 1];
        if (den == 0.0) throw Error(ErrorKind::Numeric, "zero pivot in tridiagonal solve");
        cp[l] = l + 1 < N ? c[l] / den : 0.0;
        dp[l] = (d[l] - a[l] * dp[l - 1]) / den;
    }
    x[N - 1] = dp[N - 1];
    for (std::size_t l = N - 1; l-- > 0;) x[l] = dp[l] - cp[l] * x[l + 1];
    return x;
}

// ---------------------------------------------------------------- payoff matrix

PayoffMatrix::PayoffMatrix(const GammaGrid& grid, double strike) : strike_(strike)
{
    grid.validate();
    if (!(strike > 0.0)) domain_error("strike must be > 0");
    const std::size_t N = grid.interior();
    const double h = grid.h();
    hE_ = h * strike;
    eu_.resize(N);
    es_.resize(N);
    s_.resize(N);
    w_.resize(N);
    g_.resize(N);
    for (std::size_t l = 0; l < N; ++l) {
        int i = static_cast<int>(l) - grid.n + 1;
        eu_[l] = std::exp(grid.u(i));
        s_[l] = grid.u(i + 1);
        es_[l] = std::exp(s_[l]);
        w_[l] = 1.0 / diagonal(l);
        g_[l] = std::max(strike * es_[l] - strike, 0.0);
    }
}

double PayoffMatrix::entry(std::size_t l, std::size_t i) const
{
    return i <= l ? hE_ * (es_[l] - eu_[i]) : 0.0;
}

// With s_{l-1} = u_l the rows telescope: v_l = v_{l-1} + P_ll * sum_{i<=l} H_i.
std::vector<double> PayoffMatrix::apply(const std::vector<double>& H) const
{
    const std::size_t N = size();
    std::vector<double> v(N);
    double C = 0.0, prev = 0.0;
    for (std::size_t l = 0; l < N; ++l) {
        C += H[l];
        prev += diagonal(l) * C;
        v[l] = prev;
    }
    return v;
}

std::vector<double> PayoffMatrix::solve(const std::vector<double>& v) const
{
    const std::size_t N = size();
    std::vector<double> H(N);
    double Cprev = 0.0, vprev = 0.0;
    for (std::size_t l = 0; l < N; ++l) {
        double C = (v[l] - vprev) * w_[l];
        H[l] = C - Cprev;
        Cprev = C;
        vprev = v[l];
    }
    return H;
}

DenseMatrix PayoffMatrix::dense() const
{
    DenseMatrix M(size());
    for (std::size_t l = 0; l < size(); ++l)
        for (std::size_t i = 0; i <= l; ++i) M(l, i) = entry(l, i);
    return M;
}

double PayoffMatrix::inv_sub1(std::size_t l) const { return l >= 1 ? -(w_[l] + w_[l - 1]) : 0.0; }
double PayoffMatrix::inv_sub2(std::size_t l) const { return l >= 2 ? w_[l - 1] : 0.0; }

// ---------------------------------------------------------------- scheme

GammaState initial_condition(const GammaGrid& grid, const MarketParams& market)
{
    grid.validate();
    const double sig = market.sigma;
    const double st = sig * std::sqrt(grid.tau_star);
    const double drift = (market.r - market.q - 0.5 * sig * sig) * grid.tau_star;
    GammaState s;
    s.level = 0;
    s.H.assign(2 * grid.n + 1, 0.0);
    for (int p = 1; p < 2 * grid.n; ++p) {
        double d = (grid.u(p - grid.n) + drift) / st;
        s.H[p] = std::exp(-0.5 * d * d) / (std::sqrt(2.0 * std::numbers::pi) * st);
    }
    PayoffMatrix P(grid, market.strike);
    s.v = P.apply(std::vector<double>(s.H.begin() + 1, s.H.end() - 1));
    return s;
}

TridiagonalSystem assemble(const GammaGrid& grid, const VolatilityModel& vol, const GammaState& prev)
{
    const int n = grid.n;
    const std::size_t N = grid.interior();
    if (prev.H.size() != N + 2) domain_error("state size does not match grid");
    const double h = grid.h(), k = grid.k();
    const double r = vol.market().r, q = vol.market().q;
    const double diff = k / (h * h), adv = k / (2.0 * h) * (r - q);

    std::vector<double> bp(N + 2), bv(N + 2);
    for (std::size_t p = 0; p < N + 2; ++p) {
        double Hc = std::max(prev.H[p], 0.0);
        bp[p] = vol.beta_prime(Hc);
        bv[p] = vol.beta(Hc);
        if (!(bp[p] > 0.0)) {
            std::ostringstream os;
            os << "parabolicity lost at node i=" << static_cast<int>(p) - n << " (u=" << grid.u(static_cast<int>(p) - n)
               << ", H=" << Hc << ", beta'=" << bp[p] << ")";
            throw Error(ErrorKind::Parabolicity, os.str());
        }
    }

    TridiagonalSystem sys;
    sys.a.resize(N);
    sys.b.resize(N);
    sys.c.resize(N);
    sys.d.resize(N);
    for (std::size_t l = 0; l < N; ++l) {
        std::size_t p = l + 1;
        sys.a[l] = -diff * bp[p - 1] + adv;
        sys.c[l] = -diff * bp[p] - adv;
        sys.b[l] = (1.0 + k * q) - (sys.a[l] + sys.c[l]);
        sys.d[l] = prev.H[p] + (k / h) * (bv[p] - bv[p - 1]);
    }
    return sys;
}

double complementarity_residual(const TridiagonalSystem& sys, const PayoffMatrix& P,
                                const std::vector<double>& g, const std::vector<double>& H)
{
    std::vector<double> e = sys.multiply(H);
    for (std::size_t l = 0; l < e.size(); ++l) e[l] -= sys.d[l];
    std::vector<double> r = P.apply(e), v = P.apply(H), dt = P.apply(sys.d);
    double res = 0.0;
    for (std::size_t l = 0; l < e.size(); ++l)
        res = std::max(res, std::abs(std::min(r[l], v[l] - g[l])) / (1.0 + std::abs(dt[l])));
    return res;
}

namespace {

[[noreturn]] void fail_convergence(int k_max, double res)
{
    std::ostringstream os;
    os << "PSOR did not converge in " << k_max << " sweeps (residual " << res << ")";
    throw Error(ErrorKind::Convergence, os.str(), res);
}

// Gauss-Seidel over the rows of A H - d = P^{-1} rr, with the obstacle imposed
// on v = P H node by node.  P^{-1} has three diagonals, so each row couples to
// the multipliers rr of the two preceding rows only.
PsorOutcome psor_factored(const TridiagonalSystem& sys, const PayoffMatrix& P,
                          const std::vector<double>& g, const std::vector<double>& prev_v,
                          const PsorConfig& cfg)
{
    const std::size_t N = sys.size();
    PsorOutcome out;
    out.H = P.solve(prev_v);
    auto& H = out.H;
    std::vector<double> rr(N, 0.0);
    std::vector<double> v = P.apply(H);
    const double omega = cfg.omega;

    for (int it = 1; it <= cfg.k_max; ++it) {
        double C = 0.0, vprev = 0.0, diff = 0.0;
        for (std::size_t l = 0; l < N; ++l) {
            double s = sys.d[l];
            if (l > 0) s += P.inv_sub1(l) * rr[l - 1] - sys.a[l] * H[l - 1];
            if (l > 1) s += P.inv_sub2(l) * rr[l - 2];
            if (l + 1 < N) s -= sys.c[l] * H[l + 1];
            double hn = H[l] + omega * (s / sys.b[l] - H[l]);
            const double pll = P.diagonal(l);
            const double pre = vprev + pll * C;
            double rl = 0.0;
            if (pre + pll * hn < g[l]) {
                hn = (g[l] - pre) / pll;
                rl = std::max(0.0, pll * (sys.b[l] * hn - s));
            }
            H[l] = hn;
            rr[l] = rl;
            C += hn;
            vprev = pre + pll * hn;
            diff = std::max(diff, std::abs(vprev - v[l]));
            v[l] = vprev;
        }
        if (!std::isfinite(diff)) fail_convergence(it, std::numeric_limits<double>::infinity());
        if (diff <= cfg.tol) {
            out.residual = complementarity_residual(sys, P, g, H);
            if (out.residual <= cfg.tol) {
                out.sweeps = it;
                out.v = std::move(v);
                return out;
            }
        }
    }
    fail_convergence(cfg.k_max, complementarity_residual(sys, P, g, H));
}

PsorOutcome psor_transformed(const TridiagonalSystem& sys, const PayoffMatrix& P,
                             const std::vector<double>& g, const std::vector<double>& prev_v,
                             const PsorConfig& cfg)
{
    const std::size_t N = sys.size();
    DenseMatrix At(N);
    std::vector<double> col(N);
    for (std::size_t j = 0; j < N; ++j) {
        // column j of P^{-1}: rows j, j+1, j+2
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = 1.0 / P.diagonal(j);
        if (j + 1 < N) col[j + 1] = P.inv_sub1(j + 1);
        if (j + 2 < N) col[j + 2] = P.inv_sub2(j + 2);
        std::vector<double> acol = sys.multiply(col);
        std::vector<double> pcol = P.apply(acol);
        for (std::size_t l = 0; l < N; ++l) At(l, j) = pcol[l];
    }
    for (std::size_t l = 0; l < N; ++l) {
        if (At(l, l) == 0.0) throw Error(ErrorKind::Numeric, "transformed operator has a zero diagonal");
    }
    std::vector<double> dt = P.apply(sys.d);
    LcpSolution sol = psor_dense(At, dt, g, prev_v, cfg);
    PsorOutcome out;
    out.H = P.solve(sol.x);
    out.v = std::move(sol.x);
    out.sweeps = sol.sweeps;
    out.residual = sol.residual;
    return out;
}

}  // namespace

PsorOutcome psor_solve(const TridiagonalSystem& sys, const PayoffMatrix& P,
                       const std::vector<double>& g, const std::vector<double>& prev_v,
                       const PsorConfig& cfg, PsorSweep sweep)
{
    cfg.validate();
    if (sys.size() != P.size() || g.size() != P.size() || prev_v.size() != P.size())
        domain_error("PSOR input sizes do not match");
    return sweep == PsorSweep::Factored ? psor_factored(sys, P, g, prev_v, cfg)
                                        : psor_transformed(sys, P, g, prev_v, cfg);
}

PsorOutcome psor_solve(const TridiagonalSystem& sys, const PayoffMatrix& P,
                       const std::vector<double>& prev_v, const PsorConfig& cfg, PsorSweep sweep)
{
    return psor_solve(sys, P, P.payoff(), prev_v, cfg, sweep);
}

GammaState step(const GammaState& prev, const GammaGrid& grid, const VolatilityModel& vol,
                const PayoffMatrix& P, const PsorConfig& cfg, PsorSweep sweep, StepInfo* info)
{
    TridiagonalSystem sys = assemble(grid, vol, prev);
    PsorOutcome o = psor_solve(sys, P, prev.v, cfg, sweep);
    GammaState next;
    next.level = prev.level + 1;
    next.H.assign(prev.H.size(), 0.0);
    std::copy(o.H.begin(), o.H.end(), next.H.begin() + 1);
    next.v = std::move(o.v);
    if (info) {
        info->sweeps = o.sweeps;
        info->residual = o.residual;
    }
    return next;
}

double reconstruct_price(const GammaState& state, const GammaGrid& grid, double strike, double S)
{
    if (!(S > 0.0)) domain_error("asset price must be > 0");
    const double h = grid.h();
    double sum = 0.0;
    for (std::size_t p = 0; p < state.H.size(); ++p) {
        double pay = S - strike * std::exp(grid.u(static_cast<int>(p) - grid.n));
        if (pay > 0.0) sum += pay * state.H[p];
    }
    return h * sum;
}

double mass(const GammaState& state, const GammaGrid& grid)
{
    double s = 0.0;
    for (double x : state.H) s += x;
    return grid.h() * s;
}

BoundaryPoint exercise_boundary(const GammaState& state, const PayoffMatrix& P,
                                const std::vector<double>& g, double tol)
{
    const std::size_t N = P.size();
    auto active = [&](std::size_t l) { return g[l] > 0.0 && state.v[l] - g[l] <= tol * (1.0 + g[l]); };
    BoundaryPoint bp;
    std::size_t lowest = N;
    for (std::size_t l = 0; l < N; ++l)
        if (active(l)) {
            lowest = l;
            break;
        }
    if (lowest == N) return bp;
    for (std::size_t l = lowest; l < N; ++l)
        if (!active(l)) {
            bp.contiguous = false;
            break;
        }
    bp.S_f = P.sample_price(lowest);
    return bp;
}

// ---------------------------------------------------------------- pricing

PricingResult price_call(const VolatilityModel& vol, const GammaGrid& grid, const PsorConfig& cfg,
                         const std::vector<double>& S_list, const PricingOptions& opt)
{
    grid.validate();
    cfg.validate();
    const MarketParams& mk = vol.market();
    if (std::abs(grid.T - mk.maturity) > 1e-12 * mk.maturity)
        domain_error("grid horizon must equal the option maturity");
    for (double S : S_list)
        if (!(S > 0.0)) domain_error("asset prices must be > 0");

    MarketParams m0 = mk;
    if (vol.is_constant()) m0.sigma = vol.sigma_const();
    GammaState state = initial_condition(grid, m0);

    if (opt.check_parabolicity) {
        double hmax = *std::max_element(state.H.begin(), state.H.end());
        ParabolicityReport rep = validate_parabolicity(vol, 0.0, 2.0 * hmax);
        if (!rep.pass) throw Error(ErrorKind::Parabolicity, "volatility model not parabolic: " + rep.summary());
    }

    PayoffMatrix P(grid, mk.strike);
    const std::vector<double>& g = P.payoff();

    PricingResult res;
    res.S = S_list;
    res.tau.reserve(grid.m + 1);
    res.surface.reserve(grid.m + 1);
    res.boundary.reserve(grid.m + 1);
    auto record = [&](const GammaState& s) {
        res.tau.push_back(s.level * grid.k());
        std::vector<double> row(S_list.size());
        for (std::size_t i = 0; i < S_list.size(); ++i)
            row[i] = reconstruct_price(s, grid, mk.strike, S_list[i]);
        res.surface.push_back(std::move(row));
        double ms = mass(s, grid);
        res.diag.max_mass = std::max(res.diag.max_mass, ms);
        if (s.level > 0) {
            for (std::size_t l = 0; l < g.size(); ++l)
                res.diag.min_obstacle_gap = std::min(res.diag.min_obstacle_gap, s.v[l] - g[l]);
        }
    };

    res.diag.initial_mass = mass(state, grid);
    record(state);
    res.boundary.push_back(std::numeric_limits<double>::infinity());
    res.diag.step_residuals.reserve(grid.m);

    for (int j = 1; j <= grid.m; ++j) {
        if (opt.american) {
            StepInfo info;
            state = step(state, grid, vol, P, cfg, opt.sweep, &info);
            res.diag.total_sweeps += info.sweeps;
            res.diag.max_residual = std::max(res.diag.max_residual, info.residual);
            res.diag.step_residuals.push_back(info.residual);
            BoundaryPoint b = exercise_boundary(state, P, g);
            if (!b.contiguous) ++res.diag.noncontiguous_levels;
            res.boundary.push_back(b.S_f);
        } else {
            TridiagonalSystem sys = assemble(grid, vol, state);
            std::vector<double> Hi = sys.solve();
            GammaState next;
            next.level = state.level + 1;
            next.H.assign(state.H.size(), 0.0);
            std::copy(Hi.begin(), Hi.end(), next.H.begin() + 1);
            next.v = P.apply(Hi);
            state = std::move(next);
            res.diag.step_residuals.push_back(0.0);
            res.boundary.push_back(std::numeric_limits<double>::infinity());
        }
        record(state);
    }
    res.V = res.surface.back();
    return res;
}

PricingResult price_american_call(const VolatilityModel& vol, const GammaGrid& grid,
                                  const PsorConfig& cfg, const std::vector<double>& S_list)
{
    return price_call(vol, grid, cfg, S_list, PricingOptions{});
}

PricingResult price_european_call(const VolatilityModel& vol, const GammaGrid& grid,
                                  const PsorConfig& cfg, const std::vector<double>& S_list)
{
    PricingOptions opt;
    opt.american = false;
    return price_call(vol, grid, cfg, S_list, opt);
}

}  // namespace gp
