#pragma once

#include "mits/fit.hpp"
#include "mits/model.hpp"

#include <vector>

namespace mits {

struct WaldEntry {
    int q = 0;
    double wald_stat = 0.0;
    double raw_p = 1.0;
};

struct SwtReport {
    std::vector<WaldEntry> per_q;
    std::vector<double> adjusted_p;  // aligned with per_q
    double bh_threshold = 0.0;       // largest passing step-up threshold, 0 if none
    bool reject = false;
    double alpha = 0.05;
    int dof = 0;  // 2J

    double min_raw_p() const;
    double min_adjusted_p() const;
};

struct ParamInference {
    double estimate = 0.0;
    double se = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_value = 1.0;
};

// Per-unit inference for beta0, beta1, delta, bigdelta, and the level change
// delta + bigdelta * tau_hat.
struct UnitInference {
    ParamInference beta0, beta1, delta, bigdelta, level_change;
};

// Whole-period iterated GLS fit of the straight-line (no change point) model
// with a single AR(1) error regime.
struct ReducedFit {
    double intercept = 0.0;
    double slope = 0.0;
    double phi = 0.0;
    double sigma_w = 0.0;
    int iterations = 0;
    bool converged = false;
};

ReducedFit reduced_model_fit(const Eigen::VectorXd& y,
                             double tol = kDefaultTol,
                             int max_iter = kDefaultMaxIter);

// Multivariate Wald statistic at candidate q: full-model shift estimates
// (delta_j, Delta_j) weighted by the inverse of their covariance under the
// reduced-model (single-regime) error structure. Asymptotically chi^2 with
// 2J degrees of freedom under the no-change null.
double wald_statistic(const Panel& panel, int q, double tol = kDefaultTol,
                      int max_iter = kDefaultMaxIter);

// Internal building block shared with the simulation engine: Wald statistic
// for one unit given a precomputed reduced fit.
double unit_wald_term(const Eigen::VectorXd& y, int q, const ReducedFit& red,
                      const UnitFit& full);

// Wald scan over the window with Benjamini-Hochberg step-up control.
SwtReport supremum_wald_test(const Panel& panel,
                             const ChangePointWindow& window, double alpha,
                             double tol = kDefaultTol,
                             int max_iter = kDefaultMaxIter);

// BH-adjusted p-values (step-up, FDR level alpha used only for the report's
// threshold/decision fields).
std::vector<double> bh_adjust(const std::vector<double>& raw_p);

std::vector<UnitInference> param_inference(const FitResult& fit);

double chi2_sf(double x, int dof);      // upper tail of chi-square
double normal_two_sided_p(double z);    // 2 * P(|Z| > |z|)

}  // namespace mits
