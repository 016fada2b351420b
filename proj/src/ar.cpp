#include "mits/ar.hpp"

#include "mits/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace mits {

namespace {

// Lag-pair estimator over current times t in [t_lo, t_hi]; residual r_t lives
// at vector index t-2. Shifted means are taken over each sum's own range.
SinglePhaseEstimate phase_estimate(const Eigen::VectorXd& r, int t_lo, int t_hi,
                                   const char* phase_name) {
    const int n = t_hi - t_lo + 1;
    if (n < 2) {
        std::ostringstream os;
        os << phase_name << " phase has " << n
           << " lag pair(s); at least 2 are required";
        throw model_error(os.str());
    }
    auto cur = [&](int t) { return r(t - 2); };
    auto lag = [&](int t) { return r(t - 3); };

    double mean_lag = 0.0, mean_cur = 0.0;
    for (int t = t_lo; t <= t_hi; ++t) {
        mean_lag += lag(t);
        mean_cur += cur(t);
    }
    mean_lag /= n;
    mean_cur /= n;

    double ss_cur = 0.0, ss_lag = 0.0, cross = 0.0;
    for (int t = t_lo; t <= t_hi; ++t) {
        const double a = cur(t) - mean_cur;
        const double b = lag(t) - mean_lag;
        ss_cur += a * a;
        ss_lag += b * b;
        cross += a * b;
    }
    const double vol = 0.5 * (ss_cur + ss_lag);
    if (!(vol > 0.0)) {
        std::ostringstream os;
        os << phase_name << " phase residuals have zero variance";
        throw model_error(os.str());
    }

    SinglePhaseEstimate est;
    est.phi = std::clamp(cross / vol, -kPhiClamp, kPhiClamp);

    double ss_e = 0.0;
    for (int t = t_lo; t <= t_hi; ++t) {
        const double e = (cur(t) - mean_cur) - est.phi * (lag(t) - mean_lag);
        ss_e += e * e;
    }
    est.sigma_w = std::max(std::sqrt(ss_e / n), kSigmaFloor);
    return est;
}

// White-noise fallback over residual times [t_first, t_last] (vector index
// t-2): phi = 0, sigma_w the plain standard deviation, floored.
SinglePhaseEstimate phase_fallback(const Eigen::VectorXd& r, int t_first,
                                   int t_last) {
    const int n = t_last - t_first + 1;
    double mean = 0.0;
    for (int t = t_first; t <= t_last; ++t) mean += r(t - 2);
    mean /= n;
    double ss = 0.0;
    for (int t = t_first; t <= t_last; ++t) {
        const double d = r(t - 2) - mean;
        ss += d * d;
    }
    return {0.0, std::max(std::sqrt(ss / n), kSigmaFloor)};
}

}  // namespace

double ArPhaseParams::response_sd1() const {
    return sigma_w1 / std::sqrt(1.0 - phi1 * phi1);
}

double ArPhaseParams::response_sd2() const {
    return sigma_w2 / std::sqrt(1.0 - phi2 * phi2);
}

void ArPhaseParams::validate() const {
    if (!(std::abs(phi1) < 1.0) || !(std::abs(phi2) < 1.0)) {
        throw model_error("AR(1) coefficients must lie in (-1, 1)");
    }
    if (!(sigma_w1 > 0.0) || !(sigma_w2 > 0.0)) {
        throw model_error("white-noise standard deviations must be positive");
    }
}

std::vector<ArBlock> CovarianceSpec::blocks() const {
    params.validate();
    if (q < 4 || q > T - 2) {
        throw input_error("CovarianceSpec: q=" + std::to_string(q) +
                          " outside [4, T-2] for T=" + std::to_string(T));
    }
    return {ArBlock{q - 2, params.phi1, params.sigma_w1},
            ArBlock{T - q + 1, params.phi2, params.sigma_w2}};
}

ArPhaseParams estimate_ar_phases(const Eigen::VectorXd& residuals, int q) {
    const int T = static_cast<int>(residuals.size()) + 1;
    if (q < 4 || q > T - 2) {
        throw input_error("estimate_ar_phases: q=" + std::to_string(q) +
                          " outside [4, T-2] for T=" + std::to_string(T));
    }
    if (!residuals.allFinite()) {
        throw input_error("estimate_ar_phases: residuals contain non-finite values");
    }
    const SinglePhaseEstimate pre = phase_estimate(residuals, 3, q - 1, "pre");
    const SinglePhaseEstimate post = phase_estimate(residuals, q + 1, T, "post");
    return ArPhaseParams{pre.phi, post.phi, pre.sigma_w, post.sigma_w};
}

ArPhaseParams estimate_ar_phases_lenient(const Eigen::VectorXd& residuals,
                                         int q) {
    const int T = static_cast<int>(residuals.size()) + 1;
    if (q < 4 || q > T - 2) {
        throw input_error("estimate_ar_phases_lenient: q=" + std::to_string(q) +
                          " outside [4, T-2] for T=" + std::to_string(T));
    }
    SinglePhaseEstimate pre, post;
    try {
        pre = phase_estimate(residuals, 3, q - 1, "pre");
    } catch (const model_error&) {
        pre = phase_fallback(residuals, 2, q - 1);
    }
    try {
        post = phase_estimate(residuals, q + 1, T, "post");
    } catch (const model_error&) {
        post = phase_fallback(residuals, q, T);
    }
    return ArPhaseParams{pre.phi, post.phi, pre.sigma_w, post.sigma_w};
}

SinglePhaseEstimate estimate_ar_single(const Eigen::VectorXd& residuals) {
    const int T = static_cast<int>(residuals.size()) + 1;
    if (!residuals.allFinite()) {
        throw input_error("estimate_ar_single: residuals contain non-finite values");
    }
    return phase_estimate(residuals, 3, T, "whole-period");
}

Eigen::MatrixXd build_covariance(const std::vector<ArBlock>& blocks) {
    int n_total = 0;
    for (const auto& b : blocks) n_total += b.n;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n_total, n_total);
    int off = 0;
    for (const auto& b : blocks) {
        if (!(std::abs(b.phi) < 1.0)) {
            throw model_error("build_covariance: |phi| >= 1 violates causality");
        }
        const double v = b.sigma_w * b.sigma_w / (1.0 - b.phi * b.phi);
        for (int s = 0; s < b.n; ++s) {
            for (int t = 0; t < b.n; ++t) {
                sigma(off + s, off + t) = v * std::pow(b.phi, std::abs(s - t));
            }
        }
        off += b.n;
    }
    return sigma;
}

Eigen::MatrixXd build_covariance(const CovarianceSpec& spec) {
    return build_covariance(spec.blocks());
}

Eigen::MatrixXd apply_precision(const std::vector<ArBlock>& blocks,
                                const Eigen::MatrixXd& rhs) {
    if (!rhs.allFinite()) {
        throw input_error("apply_precision: rhs contains non-finite values");
    }
    int n_total = 0;
    for (const auto& b : blocks) n_total += b.n;
    if (rhs.rows() != n_total) {
        throw input_error("apply_precision: rhs row count does not match blocks");
    }
    Eigen::MatrixXd out(rhs.rows(), rhs.cols());
    int off = 0;
    for (const auto& b : blocks) {
        const double inv_w2 = 1.0 / (b.sigma_w * b.sigma_w);
        if (b.n == 1) {
            out.row(off) = rhs.row(off) * ((1.0 - b.phi * b.phi) * inv_w2);
        } else {
            // Sigma_block^{-1} = (1/sigma_w^2) * tridiag(-phi; 1, 1+phi^2, ..., 1)
            const double d = 1.0 + b.phi * b.phi;
            for (int i = 0; i < b.n; ++i) {
                const double diag = (i == 0 || i == b.n - 1) ? 1.0 : d;
                Eigen::RowVectorXd row = diag * rhs.row(off + i);
                if (i > 0) row -= b.phi * rhs.row(off + i - 1);
                if (i < b.n - 1) row -= b.phi * rhs.row(off + i + 1);
                out.row(off + i) = inv_w2 * row;
            }
        }
        off += b.n;
    }
    return out;
}

Eigen::MatrixXd solve_gls_weights(const CovarianceSpec& spec,
                                  const Eigen::MatrixXd& rhs) {
    return apply_precision(spec.blocks(), rhs);
}

double log_det(const std::vector<ArBlock>& blocks) {
    double ld = 0.0;
    for (const auto& b : blocks) {
        const double one_m_phi2 = 1.0 - b.phi * b.phi;
        const double resp_var = b.sigma_w * b.sigma_w / one_m_phi2;
        ld += b.n * std::log(resp_var) + (b.n - 1) * std::log(one_m_phi2);
    }
    return ld;
}

Eigen::VectorXd simulate_series(const MeanParams& theta, std::optional<int> tau,
                                const ArPhaseParams& params, int T,
                                std::uint64_t seed) {
    params.validate();
    if (tau && (*tau < 4 || *tau > T - 2)) {
        throw input_error("simulate_series: tau outside [4, T-2]");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::VectorXd y(T);
    double eps = params.response_sd1() * gauss(rng);
    y(0) = (tau ? mean_function(theta, *tau, 1)
                : theta.beta0 + theta.beta1 * 1.0) +
           eps;
    for (int t = 2; t <= T; ++t) {
        const bool post = tau && t >= *tau;
        const double phi = post ? params.phi2 : params.phi1;
        const double sw = post ? params.sigma_w2 : params.sigma_w1;
        eps = phi * eps + sw * gauss(rng);
        const double mu = tau ? mean_function(theta, *tau, t)
                              : theta.beta0 + theta.beta1 * t;
        y(t - 1) = mu + eps;
    }
    return y;
}

}  // namespace mits
