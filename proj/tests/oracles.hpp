#pragma once

// Independent reference computations used only by tests. These deliberately
// avoid the library's code paths: sums are written out literally and dense
// linear algebra replaces the structured solvers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct ArPhases {
    double phi1, phi2, sigma_w1, sigma_w2;
};

// Literal transcription of the closed-form phase estimators. Residuals r_t
// live at vector index t-2 (t = 2..T). Pre-phase pairs t = 3..q-1, post-phase
// pairs t = q+1..T, each mean over its own summation range.
inline ArPhases ar_phases(const Eigen::VectorXd& r, int q) {
    const int T = static_cast<int>(r.size()) + 1;
    auto R = [&](int t) { return r(t - 2); };

    double r1a = 0.0, r1b = 0.0;
    const int n1 = (q - 1) - 3 + 1;
    for (int t = 3; t <= q - 1; ++t) {
        r1a += R(t - 1);
        r1b += R(t);
    }
    r1a /= n1;
    r1b /= n1;

    double r2a = 0.0, r2b = 0.0;
    const int n2 = T - (q + 1) + 1;
    for (int t = q + 1; t <= T; ++t) {
        r2a += R(t - 1);
        r2b += R(t);
    }
    r2a /= n2;
    r2b /= n2;

    double s1 = 0.0;
    for (int t = 3; t <= q - 1; ++t) {
        s1 += (R(t) - r1b) * (R(t) - r1b) + (R(t - 1) - r1a) * (R(t - 1) - r1a);
    }
    s1 /= 2.0;
    double s2 = 0.0;
    for (int t = q + 1; t <= T; ++t) {
        s2 += (R(t) - r2b) * (R(t) - r2b) + (R(t - 1) - r2a) * (R(t - 1) - r2a);
    }
    s2 /= 2.0;

    double num1 = 0.0;
    for (int t = 3; t <= q - 1; ++t) num1 += (R(t) - r1b) * (R(t - 1) - r1a);
    double num2 = 0.0;
    for (int t = q + 1; t <= T; ++t) num2 += (R(t) - r2b) * (R(t - 1) - r2a);

    ArPhases out{};
    out.phi1 = std::clamp(num1 / s1, -(1.0 - 1e-6), 1.0 - 1e-6);
    out.phi2 = std::clamp(num2 / s2, -(1.0 - 1e-6), 1.0 - 1e-6);

    double e1 = 0.0;
    for (int t = 3; t <= q - 1; ++t) {
        const double d = (R(t) - r1b) - out.phi1 * (R(t - 1) - r1a);
        e1 += d * d;
    }
    out.sigma_w1 = std::max(std::sqrt(e1 / n1), 1e-9);
    double e2 = 0.0;
    for (int t = q + 1; t <= T; ++t) {
        const double d = (R(t) - r2b) - out.phi2 * (R(t - 1) - r2a);
        e2 += d * d;
    }
    out.sigma_w2 = std::max(std::sqrt(e2 / n2), 1e-9);
    return out;
}

// Dense block-diagonal residual covariance built entrywise.
inline Eigen::MatrixXd dense_covariance(int q, int T, double phi1, double phi2,
                                        double sw1, double sw2) {
    const int n1 = q - 2;
    const int n2 = T - q + 1;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(T - 1, T - 1);
    const double v1 = sw1 * sw1 / (1.0 - phi1 * phi1);
    const double v2 = sw2 * sw2 / (1.0 - phi2 * phi2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j)
            sigma(i, j) = v1 * std::pow(phi1, std::abs(i - j));
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j)
            sigma(n1 + i, n1 + j) = v2 * std::pow(phi2, std::abs(i - j));
    return sigma;
}

// Dense conditional Gaussian log-likelihood via explicit determinant/solve.
inline double dense_loglik(const Eigen::VectorXd& y, double beta0, double beta1,
                           double delta, double bigdelta, int q, double phi1,
                           double phi2, double sw1, double sw2) {
    const int T = static_cast<int>(y.size());
    Eigen::MatrixXd X(T - 1, 4);
    for (int t = 2; t <= T; ++t) {
        const double post = t >= q ? 1.0 : 0.0;
        X(t - 2, 0) = 1.0;
        X(t - 2, 1) = t;
        X(t - 2, 2) = post;
        X(t - 2, 3) = post * t;
    }
    Eigen::Vector4d th(beta0, beta1, delta, bigdelta);
    const Eigen::VectorXd r = y.tail(T - 1) - X * th;
    const Eigen::MatrixXd sigma = dense_covariance(q, T, phi1, phi2, sw1, sw2);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma);
    const double quad = r.dot(lu.solve(r));
    const double logdet = std::log(std::abs(lu.determinant()));
    return -0.5 * ((T - 1) * std::log(2.0 * M_PI) + logdet + quad);
}

}  // namespace oracle
