#include "wena/stats.hpp"

#include "wena/error.hpp"

#include <cmath>

namespace wena {

double mean(const Eigen::VectorXd& x) {
    if (x.size() == 0) return 0.0;
    return x.sum() / static_cast<double>(x.size());
}

std::optional<double> pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size())
        throw Error(ErrorCode::DimensionMismatch, "pearson: length mismatch");
    const Eigen::Index n = x.size();
    if (n < 2) return std::nullopt;
    const Eigen::VectorXd xc = x.array() - mean(x);
    const Eigen::VectorXd yc = y.array() - mean(y);
    const double sxx = xc.squaredNorm();
    const double syy = yc.squaredNorm();
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return xc.dot(yc) / std::sqrt(sxx * syy);
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw Error(ErrorCode::InvalidArgument, "incomplete beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double correlation_p_value(double r, Eigen::Index n) {
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "p-value needs n >= 3");
    const double nu = static_cast<double>(n - 2);
    const double one_minus_r2 = 1.0 - r * r;
    if (one_minus_r2 <= 0.0) return 0.0;
    const double t2 = r * r * nu / one_minus_r2;
    // P(|T| > t) = I_{nu/(nu+t^2)}(nu/2, 1/2)
    return regularized_incomplete_beta(nu / 2.0, 0.5, nu / (nu + t2));
}

}  // namespace wena
