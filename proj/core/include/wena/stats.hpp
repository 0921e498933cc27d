#pragma once

#include <Eigen/Core>

#include <optional>

namespace wena {

double mean(const Eigen::VectorXd& x);

/// Pearson product-moment correlation; empty when either side has zero
/// variance (the flagged-undefined convention used across the toolkit).
std::optional<double> pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation; the workhorse behind the two-sided t-test p-values.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value for a Pearson correlation r at sample size n, from
/// t = r sqrt((n-2)/(1-r^2)) referred to Student's t with n-2 dof.
double correlation_p_value(double r, Eigen::Index n);

}  // namespace wena
