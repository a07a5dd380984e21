#include "gammapricer/lcp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "gammapricer/errors.hpp"

namespace gp {

void PsorConfig::validate() const
{
    if (!(omega >= 1.0 && omega <= 2.0)) domain_error("PSOR omega must lie in [1, 2]");
    if (!(tol > 0.0)) domain_error("PSOR tol must be > 0");
    if (k_max < 1) domain_error("PSOR k_max must be >= 1");
}

double lcp_residual(const DenseMatrix& M, const std::vector<double>& d,
                    const std::vector<double>& g, const std::vector<double>& x)
{
    double res = 0.0;
    for (std::size_t i = 0; i < M.n; ++i) {
        double r = -d[i];
        for (std::size_t j = 0; j < M.n; ++j) r += M(i, j) * x[j];
        res = std::max(res, std::abs(std::min(r, x[i] - g[i])) / (1.0 + std::abs(d[i])));
    }
    return res;
}

LcpSolution psor_dense(const DenseMatrix& M, const std::vector<double>& d,
                       const std::vector<double>& g, std::vector<double> x0,
                       const PsorConfig& cfg)
{
    const std::size_t n = M.n;
    LcpSolution out;
    out.x = std::move(x0);
    auto& x = out.x;
    for (std::size_t i = 0; i < n; ++i) x[i] = std::max(x[i], g[i]);

    for (int it = 1; it <= cfg.k_max; ++it) {
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = &M.a[i * n];
            double s = d[i];
            for (std::size_t j = 0; j < i; ++j) s -= row[j] * x[j];
            for (std::size_t j = i + 1; j < n; ++j) s -= row[j] * x[j];
            double w = s / row[i];
            double nv = std::max(x[i] + cfg.omega * (w - x[i]), g[i]);
            diff = std::max(diff, std::abs(nv - x[i]));
            x[i] = nv;
        }
        if (!std::isfinite(diff)) {
            throw Error(ErrorKind::Convergence, "PSOR diverged (non-finite iterate)",
                        std::numeric_limits<double>::infinity());
        }
        if (diff <= cfg.tol) {
            out.residual = lcp_residual(M, d, g, x);
            if (out.residual <= cfg.tol) {
                out.sweeps = it;
                return out;
            }
        }
    }
    double res = lcp_residual(M, d, g, x);
    std::ostringstream os;
    os << "PSOR did not converge in " << cfg.k_max << " sweeps (residual " << res << ")";
    throw Error(ErrorKind::Convergence, os.str(), res);
}

std::optional<std::vector<double>> lcp_enumerate(const DenseMatrix& M, const std::vector<double>& d,
                                                 const std::vector<double>& g, double tol)
{
    const std::size_t n = M.n;
    if (n > 20) domain_error("active-set enumeration limited to n <= 20");
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        M.a.data(), n, n);
    Eigen::Map<const Eigen::VectorXd> dv(d.data(), n), gv(g.data(), n);

    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        // bit set: x_i = g_i (active); clear: (M x - d)_i = 0 (free)
        std::vector<int> fr;
        Eigen::VectorXd x = gv;
        for (std::size_t i = 0; i < n; ++i)
            if (!(mask >> i & 1ul)) fr.push_back(static_cast<int>(i));
        if (!fr.empty()) {
            const auto nf = static_cast<Eigen::Index>(fr.size());
            Eigen::MatrixXd Aff(nf, nf);
            Eigen::VectorXd rhs(nf);
            for (Eigen::Index a = 0; a < nf; ++a) {
                rhs(a) = dv(fr[a]);
                for (std::size_t j = 0; j < n; ++j)
                    if (mask >> j & 1ul) rhs(a) -= A(fr[a], j) * gv(j);
                for (Eigen::Index b = 0; b < nf; ++b) Aff(a, b) = A(fr[a], fr[b]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(Aff);
            if (!lu.isInvertible()) continue;
            Eigen::VectorXd xf = lu.solve(rhs);
            for (Eigen::Index a = 0; a < nf; ++a) x(fr[a]) = xf(a);
        }
        Eigen::VectorXd r = A * x - dv;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            double scale = tol * (1.0 + std::abs(d[i]) + std::abs(g[i]));
            if (mask >> i & 1ul) ok = r(i) >= -scale;
            else ok = x(i) - g[i] >= -scale;
        }
        if (ok) return std::vector<double>(x.data(), x.data() + n);
    }
    return std::nullopt;
}

}  // namespace gp
