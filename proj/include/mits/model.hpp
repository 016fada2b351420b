#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace mits {

// Aligned panel of J outcome series, each of length T. Series are complete:
// missingness is rejected at ingestion, not imputed.
struct Panel {
    Eigen::MatrixXd values;               // J x T
    std::vector<std::string> unit_names;  // J labels
    std::string time_origin;              // opaque label for t = 1
    int T = 0;
    int J = 0;

    static Panel create(Eigen::MatrixXd values,
                        std::vector<std::string> unit_names,
                        std::string time_origin);
};

// Segmented mean-function coefficients for one unit: intercept and slope of
// the pre-change phase plus the intercept/slope shifts after the change point.
struct MeanParams {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double delta = 0.0;
    double bigdelta = 0.0;
};

// Candidate change points around the formal intervention time.
struct ChangePointWindow {
    std::vector<int> candidates;  // strictly increasing, each in [4, T-2]
    int intervention_time = 0;

    static ChangePointWindow around(int intervention_time, int m, int k, int T);
    static ChangePointWindow explicit_range(int first, int last, int T,
                                            int intervention_time);
    void validate(int T) const;
};

struct EffectSizes {
    double level_change = 0.0;  // delta + bigdelta * tau_hat
    double trend_change = 0.0;  // bigdelta
    int lag = 0;                // tau_hat - intervention_time
};

// Segmented design matrix for observations t = 2..T: row [1, t, I(t>=q), t*I(t>=q)].
Eigen::MatrixXd design_matrix(int q, int T);

double mean_function(const MeanParams& theta, int tau, int t);

EffectSizes effect_sizes(const MeanParams& theta, int tau_hat, int t_star);

}  // namespace mits
