#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace gp {

struct PsorConfig {
    double omega = 1.3;
    double tol = 1e-8;
    int k_max = 10000;

    void validate() const;
};

// Dense row-major square matrix, just enough for small LCPs and the
// materialized transformed operator.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    explicit DenseMatrix(std::size_t n_ = 0) : n(n_), a(n_ * n_, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

struct LcpSolution {
    std::vector<double> x;
    int sweeps = 0;
    double residual = 0.0;
};

// max_i |min((M x - d)_i, (x - g)_i)| / (1 + |d_i|)
double lcp_residual(const DenseMatrix& M, const std::vector<double>& d,
                    const std::vector<double>& g, const std::vector<double>& x);

// Find x >= g with M x - d >= 0 and (M x - d).(x - g) = 0 by projected SOR,
// warm-started from x0.  Throws gp::Error(Convergence) after k_max sweeps.
LcpSolution psor_dense(const DenseMatrix& M, const std::vector<double>& d,
                       const std::vector<double>& g, std::vector<double> x0,
                       const PsorConfig& cfg);

// Exhaustive active-set search (2^n candidates) -- small reference oracle.
std::optional<std::vector<double>> lcp_enumerate(const DenseMatrix& M, const std::vector<double>& d,
                                                 const std::vector<double>& g, double tol = 1e-12);

}  // namespace gp
