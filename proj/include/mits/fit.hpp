#pragma once

#include "mits/ar.hpp"
#include "mits/model.hpp"

#include <map>
#include <vector>

namespace mits {

struct UnitFit {
    MeanParams theta;
    ArPhaseParams ar;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> loglik_trace;  // conditional loglik at each iterate
};

struct FitResult {
    int tau_hat = 0;
    std::map<int, double> profile;  // q -> pooled log-likelihood L(q)
    std::vector<UnitFit> unit_fits;
    ChangePointWindow window;
    int T = 0;
};

inline constexpr double kDefaultTol = 1e-6;
inline constexpr int kDefaultMaxIter = 100;

// Iterated GLS for one unit at a fixed candidate q: OLS start, then
// alternate AR-phase estimation from residuals with a GLS re-solve until the
// (phi1, phi2) iterates move less than tol. Non-convergence only clears the
// flag; it is not an error.
UnitFit fit_unit(const Eigen::VectorXd& y, int q, double tol = kDefaultTol,
                 int max_iter = kDefaultMaxIter);

// Gaussian log-likelihood of y_2..y_T conditional on y_1, using the
// block-structure closed form for log|Sigma|.
double conditional_loglik(const Eigen::VectorXd& y, const MeanParams& theta,
                          const CovarianceSpec& spec);

// Grid search over the window: L(q) pools unit log-likelihoods, tau_hat is
// the argmax (ties broken by the smallest q).
FitResult fit_panel(const Panel& panel, const ChangePointWindow& window,
                    double tol = kDefaultTol, int max_iter = kDefaultMaxIter);

// Single GLS solve given fixed covariance blocks. Exposed for reuse by the
// inference module. Throws model_error on a rank-deficient design.
Eigen::VectorXd gls_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                          const std::vector<ArBlock>& blocks);

}  // namespace mits
