#pragma once

#include "mits/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace mits {

// Phase-specific AR(1) error parameters for one unit. Causality requires
// |phi| < 1; estimators clamp into the open interval.
struct ArPhaseParams {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double sigma_w1 = 1.0;
    double sigma_w2 = 1.0;

    double response_sd1() const;  // sigma_w1 / sqrt(1 - phi1^2)
    double response_sd2() const;
    void validate() const;
};

// One stationary AR(1) segment of a block-diagonal residual covariance.
struct ArBlock {
    int n = 0;
    double phi = 0.0;
    double sigma_w = 1.0;
};

// Residual covariance for a two-phase unit: pre block over residual times
// t = 2..q-1 and post block over t = q..T.
struct CovarianceSpec {
    int q = 0;
    int T = 0;
    ArPhaseParams params;

    std::vector<ArBlock> blocks() const;
};

inline constexpr double kPhiClamp = 1.0 - 1e-6;
inline constexpr double kSigmaFloor = 1e-9;

// Closed-form phase estimators from residuals r_t, t = 2..T (vector index
// t-2). Pre-phase lag pairs run over t = 3..q-1, post-phase over t = q+1..T;
// the pair straddling the change point is excluded from both phases.
// Throws model_error when a phase has fewer than two lag pairs or zero
// variance.
ArPhaseParams estimate_ar_phases(const Eigen::VectorXd& residuals, int q);

// Fitter-facing variant: a zero-variance phase degrades to white noise
// (phi = 0, sigma_w floored at the phase standard deviation) instead of
// throwing. Exact-fit data leaves machine-epsilon residuals, which must not
// abort the grid search.
ArPhaseParams estimate_ar_phases_lenient(const Eigen::VectorXd& residuals,
                                         int q);

// Single-regime variant used by the reduced (no change point) model: one set
// of lag pairs over t = 3..T.
struct SinglePhaseEstimate {
    double phi = 0.0;
    double sigma_w = 1.0;
};
SinglePhaseEstimate estimate_ar_single(const Eigen::VectorXd& residuals);

// Dense (T-1)x(T-1) block-diagonal covariance; entry (s,t) within a block is
// sigma_w^2/(1-phi^2) * phi^|s-t|.
Eigen::MatrixXd build_covariance(const CovarianceSpec& spec);
Eigen::MatrixXd build_covariance(const std::vector<ArBlock>& blocks);

// Sigma^{-1} * rhs without forming Sigma: each AR(1) block has an explicit
// tridiagonal inverse.
Eigen::MatrixXd solve_gls_weights(const CovarianceSpec& spec,
                                  const Eigen::MatrixXd& rhs);
Eigen::MatrixXd apply_precision(const std::vector<ArBlock>& blocks,
                                const Eigen::MatrixXd& rhs);

// log|Sigma| from the block structure: per block n*log(sigma^2) +
// (n-1)*log(1-phi^2) with sigma^2 the response variance.
double log_det(const std::vector<ArBlock>& blocks);

// Simulated series y_t = mu_t + eps_t, t = 1..T, with a stationary AR(1)
// start and the post-phase coefficient applying from t = tau onward.
// tau = nullopt generates from the single-regime null model.
Eigen::VectorXd simulate_series(const MeanParams& theta, std::optional<int> tau,
                                const ArPhaseParams& params, int T,
                                std::uint64_t seed);

}  // namespace mits
