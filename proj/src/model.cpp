#include "mits/model.hpp"

#include "mits/errors.hpp"

#include <cmath>
#include <sstream>

namespace mits {

Panel Panel::create(Eigen::MatrixXd values, std::vector<std::string> unit_names,
                    std::string time_origin) {
    Panel p;
    p.J = static_cast<int>(values.rows());
    p.T = static_cast<int>(values.cols());
    if (p.J < 1) throw input_error("panel must contain at least one unit");
    if (p.T < 6) {
        throw input_error("panel length T=" + std::to_string(p.T) +
                          " is below the minimum of 6");
    }
    if (static_cast<int>(unit_names.size()) != p.J) {
        throw input_error("unit_names size does not match row count");
    }
    if (!values.allFinite()) {
        throw input_error("panel contains non-finite values");
    }
    p.values = std::move(values);
    p.unit_names = std::move(unit_names);
    p.time_origin = std::move(time_origin);
    return p;
}

ChangePointWindow ChangePointWindow::around(int intervention_time, int m, int k,
                                            int T) {
    if (m < 0 || k < 0) throw input_error("window offsets m, k must be >= 0");
    ChangePointWindow w;
    w.intervention_time = intervention_time;
    for (int q = intervention_time - m; q <= intervention_time + k; ++q) {
        w.candidates.push_back(q);
    }
    w.validate(T);
    return w;
}

ChangePointWindow ChangePointWindow::explicit_range(int first, int last, int T,
                                                    int intervention_time) {
    ChangePointWindow w;
    w.intervention_time = intervention_time;
    for (int q = first; q <= last; ++q) w.candidates.push_back(q);
    w.validate(T);
    return w;
}

void ChangePointWindow::validate(int T) const {
    if (candidates.empty()) throw input_error("change-point window is empty");
    int prev = candidates.front() - 1;
    for (int q : candidates) {
        if (q <= prev) {
            throw input_error("change-point candidates must be strictly increasing");
        }
        if (q < 4 || q > T - 2) {
            std::ostringstream os;
            os << "candidate change point q=" << q << " outside [4, " << (T - 2)
               << "] for T=" << T;
            throw input_error(os.str());
        }
        prev = q;
    }
}

Eigen::MatrixXd design_matrix(int q, int T) {
    if (q < 4 || q > T - 2) {
        std::ostringstream os;
        os << "design_matrix: q=" << q << " violates 4 <= q <= T-2 (T=" << T << ")";
        throw input_error(os.str());
    }
    Eigen::MatrixXd X(T - 1, 4);
    for (int t = 2; t <= T; ++t) {
        const int row = t - 2;
        const double post = (t >= q) ? 1.0 : 0.0;
        X(row, 0) = 1.0;
        X(row, 1) = static_cast<double>(t);
        X(row, 2) = post;
        X(row, 3) = post * static_cast<double>(t);
    }
    return X;
}

double mean_function(const MeanParams& theta, int tau, int t) {
    if (t < tau) return theta.beta0 + theta.beta1 * t;
    return (theta.beta0 + theta.delta) + (theta.beta1 + theta.bigdelta) * t;
}

EffectSizes effect_sizes(const MeanParams& theta, int tau_hat, int t_star) {
    EffectSizes e;
    e.level_change = theta.delta + theta.bigdelta * tau_hat;
    e.trend_change = theta.bigdelta;
    e.lag = tau_hat - t_star;
    return e;
}

}  // namespace mits
