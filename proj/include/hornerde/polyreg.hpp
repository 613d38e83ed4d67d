#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hornerde/jet.hpp"
#include "hornerde/problems.hpp"

namespace hornerde::polyreg {

// P(t) = sum_j c_j t^j / j!, so that P^(i)(0) = c_i.
struct FactorialPolynomial {
  std::vector<double> coeffs;
  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
};

// A c = b over the free coefficients c_n..c_m; column q holds c_{offset+q}.
struct CollocationSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  int column_offset = 0;
};

// f(t) minus the contribution of the IC-fixed coefficients c_0..c_{n-1}.
double ic_corrected_forcing(const OdeProblem& problem, double t);

CollocationSystem build_system(const OdeProblem& problem, int degree,
                               std::span<const double> points);

// argmin ||A c - b||_2 through a complete orthogonal decomposition in long
// double with iterative refinement; the minimum-norm minimizer when A is rank
// deficient.
Eigen::VectorXd solve_least_squares(const CollocationSystem& system);

FactorialPolynomial fit(const OdeProblem& problem, int degree,
                        std::span<const double> points);

Jet eval_factorial_poly(const FactorialPolynomial& p, double t, int order);

}  // namespace hornerde::polyreg
