#pragma once

#include <stdexcept>
#include <string>

namespace gp {

enum class ErrorKind {
    Domain,        // argument outside the admissible set
    Numeric,       // quadrature / arithmetic failure
    Parabolicity,  // sigma_hat^2 or beta' lost positivity
    Convergence,   // iterative solver exhausted its budget
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, double residual = 0.0)
        : std::runtime_error(what), kind_(kind), residual_(residual) {}

    ErrorKind kind() const noexcept { return kind_; }
    // last residual / error estimate for Numeric and Convergence errors
    double residual() const noexcept { return residual_; }

private:
    ErrorKind kind_;
    double residual_;
};

[[noreturn]] inline void domain_error(const std::string& what)
{
    throw Error(ErrorKind::Domain, what);
}

}  // namespace gp
