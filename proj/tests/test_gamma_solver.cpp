#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gammapricer/analytic.hpp"
#include "gammapricer/errors.hpp"
#include "gammapricer/gamma_solver.hpp"

using namespace gp;

namespace {

const MarketParams kMarket{};
CostModel table_costs() { return CostModel::piecewise_linear({0.02, 0.3, 0.05, 0.1}); }

GammaGrid grid(int n, int m)
{
    GammaGrid g;
    g.n = n;
    g.m = m;
    return g;
}

std::vector<double> interior(const GammaState& s) { return {s.H.begin() + 1, s.H.end() - 1}; }

std::vector<double> strikes()
{
    std::vector<double> S;
    for (int s = 40; s <= 60; s += 2) S.push_back(s);
    return S;
}

}  // namespace

TEST(Grid, Validation)
{
    EXPECT_NO_THROW(grid(250, 200).validate());
    EXPECT_DOUBLE_EQ(grid(250, 200).h(), 0.01);
    EXPECT_DOUBLE_EQ(grid(250, 200).k(), 0.005);
    EXPECT_EQ(grid(250, 200).interior(), 499u);
    GammaGrid g = grid(250, 200);
    g.tau_star = 0.0;
    EXPECT_THROW(g.validate(), Error);
    g = grid(1, 200);
    EXPECT_THROW(g.validate(), Error);
    g = grid(250, 0);
    EXPECT_THROW(g.validate(), Error);
}

TEST(InitialCondition, MassPositivityPeak)
{
    GammaGrid g = grid(250, 200);
    GammaState s = initial_condition(g, kMarket);
    ASSERT_EQ(s.H.size(), 501u);
    EXPECT_EQ(s.H.front(), 0.0);
    EXPECT_EQ(s.H.back(), 0.0);
    EXPECT_NEAR(mass(s, g), 1.0, 1e-4);
    for (std::size_t p = 1; p + 1 < s.H.size(); ++p) EXPECT_GE(s.H[p], 0.0);
    for (int p = 200; p <= 300; ++p) EXPECT_GT(s.H[p], 0.0);
    auto peak = std::max_element(s.H.begin(), s.H.end()) - s.H.begin();
    EXPECT_EQ(peak, 250);  // u = 0
    EXPECT_EQ(s.v.size(), g.interior());
}

TEST(Assemble, ConstantModelRowsIdentical)
{
    GammaGrid g = grid(50, 20);
    auto vol = VolatilityModel(kMarket, CostModel::constant(0.01), Side::Bid);
    GammaState s = initial_condition(g, kMarket);
    for (std::size_t p = 1; p + 1 < s.H.size(); ++p) s.H[p] = std::max(s.H[p], 1e-3);
    s.H.front() = s.H.back() = 1e-3;  // keep H > 0 so beta' is the interior constant
    auto sys = assemble(g, vol, s);
    const double k = g.k(), q = kMarket.q;
    for (std::size_t l = 0; l < sys.size(); ++l) {
        EXPECT_DOUBLE_EQ(sys.a[l], sys.a[0]);
        EXPECT_DOUBLE_EQ(sys.c[l], sys.c[0]);
        EXPECT_NEAR(sys.b[l] + sys.a[l] + sys.c[l], 1 + k * q, 1e-14);
    }
    EXPECT_GT(sys.dominance_margin(), 0.0);
}

TEST(Assemble, ZeroState)
{
    GammaGrid g = grid(20, 10);
    VolatilityModel vol(kMarket, table_costs(), Side::Bid);
    GammaState s;
    s.H.assign(g.interior() + 2, 0.0);
    auto sys = assemble(g, vol, s);
    const double h = g.h(), k = g.k(), bp0 = vol.beta_prime(0.0), adv = k / (2 * h) * (kMarket.r - kMarket.q);
    for (std::size_t l = 0; l < sys.size(); ++l) {
        EXPECT_EQ(sys.d[l], 0.0);
        EXPECT_NEAR(sys.a[l], -k / (h * h) * bp0 + adv, 1e-15);
        EXPECT_NEAR(sys.c[l], -k / (h * h) * bp0 - adv, 1e-15);
    }
}

TEST(Assemble, RowSumsMatchDirectEvaluation)
{
    GammaGrid g = grid(250, 200);
    VolatilityModel vol(kMarket, table_costs(), Side::Bid);
    GammaState s = initial_condition(g, kMarket);
    auto sys = assemble(g, vol, s);
    const double h = g.h(), k = g.k();
    for (std::size_t l = 0; l < sys.size(); ++l) {
        double bl = vol.beta_prime(s.H[l]), bi = vol.beta_prime(s.H[l + 1]);
        double rowsum = sys.a[l] + sys.b[l] + sys.c[l];
        EXPECT_NEAR(rowsum, 1 + k * kMarket.q, 1e-12);
        EXPECT_NEAR(sys.b[l], 1 + k * kMarket.q + (k / (h * h)) * (bl + bi), 1e-12);
        EXPECT_NEAR(sys.d[l], s.H[l + 1] + (k / h) * (vol.beta(s.H[l + 1]) - vol.beta(s.H[l])), 1e-12);
    }
}

TEST(Assemble, ParabolicityFailureNamesNode)
{
    GammaGrid g = grid(50, 20);
    VolatilityModel vol(kMarket, CostModel::constant(0.025), Side::Bid);
    GammaState s = initial_condition(g, kMarket);
    try {
        assemble(g, vol, s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parabolicity);
        EXPECT_NE(std::string(e.what()).find("node i="), std::string::npos);
    }
}

TEST(PayoffMatrix, StructureAndEntries)
{
    GammaGrid g = grid(30, 10);
    PayoffMatrix P(g, 50.0);
    const std::size_t N = P.size();
    ASSERT_EQ(N, 59u);
    for (std::size_t l = 0; l < N; ++l) {
        EXPECT_GT(P.diagonal(l), 0.0);
        int i = static_cast<int>(l) - g.n + 1;
        EXPECT_NEAR(P.sample_price(l), 50.0 * std::exp(g.u(i + 1)), 1e-12);
        EXPECT_NEAR(P.payoff()[l], std::max(P.sample_price(l) - 50.0, 0.0), 1e-12);
        for (std::size_t j = 0; j < N; ++j) {
            double expect = g.h() * 50.0 * std::max(std::exp(g.u(i + 1)) - std::exp(g.u(static_cast<int>(j) - g.n + 1)), 0.0);
            EXPECT_NEAR(P.entry(l, j), expect, 1e-12);
            if (j > l) EXPECT_EQ(P.entry(l, j), 0.0);
        }
    }
}

TEST(PayoffMatrix, ApplyMatchesDenseAndInverseIsBanded)
{
    GammaGrid g = grid(30, 10);
    PayoffMatrix P(g, 50.0);
    DenseMatrix D = P.dense();
    const std::size_t N = P.size();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> H(N);
    for (auto& x : H) x = U(rng);
    auto v = P.apply(H);
    for (std::size_t l = 0; l < N; ++l) {
        double s = 0.0;
        for (std::size_t j = 0; j < N; ++j) s += D(l, j) * H[j];
        EXPECT_NEAR(v[l], s, 1e-11 * (1 + std::abs(s)));
    }
    // P times the banded inverse is the identity
    for (std::size_t j = 0; j < N; ++j) {
        std::vector<double> col(N, 0.0);
        col[j] = 1.0 / P.diagonal(j);
        if (j + 1 < N) col[j + 1] = P.inv_sub1(j + 1);
        if (j + 2 < N) col[j + 2] = P.inv_sub2(j + 2);
        auto e = P.apply(col);
        for (std::size_t l = 0; l < N; ++l) EXPECT_NEAR(e[l], l == j ? 1.0 : 0.0, 1e-9);
    }
}

TEST(PayoffMatrix, RoundTrip)
{
    GammaGrid g = grid(500, 800);
    PayoffMatrix P(g, 50.0);
    GammaState s = initial_condition(g, kMarket);
    auto H = interior(s);
    auto back = P.solve(P.apply(H));
    double hmax = *std::max_element(H.begin(), H.end()), err = 0.0;
    for (std::size_t l = 0; l < H.size(); ++l) err = std::max(err, std::abs(back[l] - H[l]));
    EXPECT_LE(err, 1e-10 * hmax);
}

TEST(PayoffMatrix, InitialValueMatchesClosedForm)
{
    GammaGrid g = grid(250, 200);
    PayoffMatrix P(g, 50.0);
    GammaState s = initial_condition(g, kMarket);
    for (std::size_t l = 0; l < P.size(); ++l) {
        double S = P.sample_price(l);
        if (S < 20.0 || S > 120.0) continue;
        EXPECT_NEAR(s.v[l], analytic_european_call(kMarket, kMarket.sigma, S, g.tau_star), 0.01 * 50.0);
    }
}

TEST(PsorSolve, UnconstrainedEqualsDirectSolve)
{
    GammaGrid g = grid(60, 20);
    VolatilityModel vol(kMarket, table_costs(), Side::Bid);
    GammaState s = initial_condition(g, kMarket);
    auto sys = assemble(g, vol, s);
    PayoffMatrix P(g, 50.0);
    auto Hd = sys.solve();
    auto vd = P.apply(Hd);
    std::vector<double> none(P.size(), -std::numeric_limits<double>::infinity());
    auto o = psor_solve(sys, P, none, s.v, PsorConfig{1.3, 1e-12, 20000}, PsorSweep::Factored);
    for (std::size_t l = 0; l < P.size(); ++l) EXPECT_NEAR(o.v[l], vd[l], 1e-8 * (1 + std::abs(vd[l])));
}

TEST(PsorSolve, TransformedSweepOnVariableCosts)
{
    auto S = std::vector<double>{50.0};
    PricingOptions tr;
    tr.sweep = PsorSweep::Transformed;
    // agrees with the factored sweep where it converges
    VolatilityModel ask(kMarket, table_costs(), Side::Ask);
    EXPECT_NEAR(price_call(ask, grid(60, 20), PsorConfig{}, S, tr).V[0],
                price_call(ask, grid(60, 20), PsorConfig{}, S).V[0], 1e-6);
    // P A P^{-1} loses diagonal dominance on the bid side at the finer mesh
    VolatilityModel bid(kMarket, table_costs(), Side::Bid);
    try {
        price_call(bid, grid(250, 200), PsorConfig{}, S, tr);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Convergence);
    }
}

TEST(PsorSolve, ObstacleFixedPoint)
{
    GammaGrid g = grid(40, 20);
    auto vol = VolatilityModel::constant(kMarket, 0.3);
    GammaState s = initial_condition(g, kMarket);
    auto sys = assemble(g, vol, s);
    PayoffMatrix P(g, 50.0);
    // d~ = A~ g  <=>  d = A P^{-1} g
    std::vector<double> g_obst(P.size());
    for (std::size_t l = 0; l < P.size(); ++l) g_obst[l] = P.payoff()[l] + 0.1;
    sys.d = sys.multiply(P.solve(g_obst));
    for (PsorSweep sw : {PsorSweep::Factored, PsorSweep::Transformed}) {
        auto o = psor_solve(sys, P, g_obst, s.v, PsorConfig{}, sw);
        for (std::size_t l = 0; l < P.size(); ++l) EXPECT_NEAR(o.v[l], g_obst[l], 1e-7 * (1 + g_obst[l]));
    }
}

TEST(PsorSolve, ComplementarityPostcondition)
{
    GammaGrid g = grid(250, 200);
    VolatilityModel vol(kMarket, table_costs(), Side::Ask);
    PayoffMatrix P(g, 50.0);
    GammaState s = initial_condition(g, kMarket);
    PsorConfig cfg;
    for (int j = 0; j < 5; ++j) {
        auto sys = assemble(g, vol, s);
        auto o = psor_solve(sys, P, s.v, cfg);
        EXPECT_LE(o.residual, cfg.tol);
        EXPECT_LE(complementarity_residual(sys, P, P.payoff(), o.H), cfg.tol);
        for (std::size_t l = 0; l < P.size(); ++l) EXPECT_GE(o.v[l], P.payoff()[l] - 1e-12 * (1 + P.payoff()[l]));
        s = step(s, g, vol, P, cfg);
    }
}

TEST(PsorSolve, FactoredMatchesTransformedForConstantVolatility)
{
    GammaGrid g = grid(60, 40);
    auto vol = VolatilityModel::constant(kMarket, 0.3);
    PricingOptions a, b;
    b.sweep = PsorSweep::Transformed;
    auto S = strikes();
    auto ra = price_call(vol, g, PsorConfig{}, S, a);
    auto rb = price_call(vol, g, PsorConfig{}, S, b);
    for (std::size_t i = 0; i < S.size(); ++i) EXPECT_NEAR(ra.V[i], rb.V[i], 1e-6);
}

TEST(PsorSolve, NonConvergenceCarriesResidual)
{
    GammaGrid g = grid(100, 50);
    VolatilityModel vol(kMarket, table_costs(), Side::Bid);
    PayoffMatrix P(g, 50.0);
    GammaState s = initial_condition(g, kMarket);
    auto sys = assemble(g, vol, s);
    try {
        psor_solve(sys, P, s.v, PsorConfig{1.3, 1e-12, 2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Convergence);
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(Step, NoDividendAmericanEqualsEuropean)
{
    MarketParams m = kMarket;
    m.q = 0.0;
    GammaGrid g = grid(200, 100);
    auto vol = VolatilityModel::constant(m, 0.3);
    auto S = strikes();
    auto am = price_american_call(vol, g, PsorConfig{}, S);
    auto eu = price_european_call(vol, g, PsorConfig{}, S);
    // the smoothed initial profile dips below the payoff near the strike, so the
    // obstacle binds on the first step only; that imprint is the whole difference
    for (std::size_t i = 0; i < S.size(); ++i) EXPECT_NEAR(am.V[i], eu.V[i], 2e-4 * 50.0);
    for (std::size_t j = 2; j < am.boundary.size(); ++j) EXPECT_TRUE(std::isinf(am.boundary[j])) << j;
}

TEST(Step, ZeroCostIsPlainBlackScholes)
{
    GammaGrid g = grid(250, 200);
    VolatilityModel vol(kMarket, CostModel::constant(0.0), Side::Bid);
    auto ref = VolatilityModel::constant(kMarket, kMarket.sigma);
    auto S = strikes();
    auto a = price_european_call(vol, g, PsorConfig{}, S);
    auto b = price_european_call(ref, g, PsorConfig{}, S);
    for (std::size_t i = 0; i < S.size(); ++i) EXPECT_NEAR(a.V[i], b.V[i], 1e-12);
}

TEST(Reconstruct, LimitsAndMonotonicity)
{
    GammaGrid g = grid(250, 200);
    GammaState s = initial_condition(g, kMarket);
    EXPECT_NEAR(reconstruct_price(s, g, 50.0, 1e-6), 0.0, 1e-12);
    EXPECT_THROW(reconstruct_price(s, g, 50.0, 0.0), Error);
    double prev = 0.0;
    for (int i = 1; i <= 400; ++i) {
        double S = 20.0 + 0.2 * i, V = reconstruct_price(s, g, 50.0, S);
        EXPECT_GE(V, prev);
        prev = V;
        EXPECT_NEAR(V, analytic_european_call(kMarket, kMarket.sigma, S, g.tau_star), 0.01 * 50.0);
    }
}

TEST(Boundary, NoDividendSentinel)
{
    MarketParams m = kMarket;
    m.q = 0.0;
    GammaGrid g = grid(100, 50);
    auto vol = VolatilityModel::constant(m, 0.3);
    PayoffMatrix P(g, 50.0);
    GammaState s = initial_condition(g, m);
    for (int j = 0; j < 2; ++j) s = step(s, g, vol, P, PsorConfig{});
    auto b = exercise_boundary(s, P, P.payoff());
    EXPECT_TRUE(std::isinf(b.S_f));
    EXPECT_TRUE(b.contiguous);
}

TEST(Boundary, NoncontiguousIsReported)
{
    GammaGrid g = grid(20, 10);
    PayoffMatrix P(g, 50.0);
    GammaState s;
    s.v = P.payoff();
    for (auto& x : s.v) x += 1.0;
    s.v[30] = P.payoff()[30];
    s.v[36] = P.payoff()[36];
    for (std::size_t l = 33; l < P.size(); ++l) s.v[l] = P.payoff()[l];
    auto b = exercise_boundary(s, P, P.payoff());
    EXPECT_FALSE(b.contiguous);
    EXPECT_DOUBLE_EQ(b.S_f, P.sample_price(30));
}

TEST(Boundary, NearExpiryLimit)
{
    GammaGrid g = grid(500, 800);
    auto vol = VolatilityModel::constant(kMarket, 0.3);
    auto r = price_american_call(vol, g, PsorConfig{}, {50.0});
    const double limit = std::max(50.0, kMarket.r * 50.0 / kMarket.q);
    // first level past the smoothing horizon; level 1 still carries the smoothed-payoff imprint
    EXPECT_NEAR(r.boundary[4], limit, 5.0);
    EXPECT_LT(r.boundary[1], limit - 10.0);
    EXPECT_EQ(r.diag.noncontiguous_levels, 0);
    // nondecreasing in tau up to one cell
    for (std::size_t j = 3; j < r.boundary.size(); ++j)
        EXPECT_GE(r.boundary[j], r.boundary[j - 1] * std::exp(-g.h()) - 1e-9) << j;
}

TEST(Pricing, ShortMaturityApproachesPayoff)
{
    MarketParams m = kMarket;
    m.maturity = 0.006;
    GammaGrid g = grid(250, 1);
    g.T = m.maturity;
    VolatilityModel vol(m, table_costs(), Side::Bid);
    auto S = strikes();
    auto r = price_american_call(vol, g, PsorConfig{}, S);
    for (std::size_t i = 0; i < S.size(); ++i) EXPECT_NEAR(r.V[i], std::max(S[i] - 50.0, 0.0), 0.02 * 50.0);
}

TEST(Pricing, AmericanDominatesEuropeanAndIntrinsic)
{
    GammaGrid g = grid(250, 200);
    auto S = strikes();
    for (Side side : {Side::Bid, Side::Ask}) {
        VolatilityModel vol(kMarket, table_costs(), side);
        auto am = price_american_call(vol, g, PsorConfig{}, S);
        auto eu = price_european_call(vol, g, PsorConfig{}, S);
        for (std::size_t j = 1; j < am.surface.size(); ++j)
            for (std::size_t i = 0; i < S.size(); ++i) {
                EXPECT_GE(am.surface[j][i], eu.surface[j][i] - 1e-8);
                EXPECT_GE(am.surface[j][i], std::max(S[i] - 50.0, 0.0) - 1e-8);
            }
        EXPECT_LE(am.diag.max_mass, 2.0);
        EXPECT_LE(am.diag.max_residual, PsorConfig{}.tol);
        EXPECT_EQ(am.diag.step_residuals.size(), 200u);
    }
}

TEST(Pricing, EuropeanConstantVolatilityClosedForm)
{
    GammaGrid g = grid(250, 200);
    auto vol = VolatilityModel::constant(kMarket, 0.3);
    auto S = strikes();
    auto r = price_european_call(vol, g, PsorConfig{}, S);
    for (std::size_t i = 0; i < S.size(); ++i)
        EXPECT_NEAR(r.V[i], analytic_european_call(kMarket, 0.3, S[i], 1.0), 0.01 * 50.0);
}

TEST(Pricing, RejectsMismatchedHorizonAndNonParabolicModel)
{
    GammaGrid g = grid(50, 20);
    g.T = 2.0;
    EXPECT_THROW(price_american_call(VolatilityModel::constant(kMarket, 0.3), g, PsorConfig{}, {50.0}), Error);
    try {
        price_american_call(VolatilityModel(kMarket, CostModel::constant(0.025), Side::Bid), grid(50, 20),
                            PsorConfig{}, {50.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parabolicity);
    }
}

TEST(Pricing, MeshRefinementContracts)
{
    VolatilityModel vol(kMarket, table_costs(), Side::Bid);
    std::vector<double> V;
    for (auto [n, m] : {std::pair{100, 50}, std::pair{200, 100}, std::pair{400, 200}, std::pair{800, 400}})
        V.push_back(price_american_call(vol, grid(n, m), PsorConfig{}, {50.0}).V[0]);
    for (std::size_t i = 2; i < V.size(); ++i)
        EXPECT_LT(std::abs(V[i] - V[i - 1]), 2.0 * std::abs(V[i - 1] - V[i - 2])) << i;
}
