#include "mits/fit.hpp"

#include "mits/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mits {

Eigen::VectorXd gls_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                          const std::vector<ArBlock>& blocks) {
    const Eigen::MatrixXd PX = apply_precision(blocks, X);
    const Eigen::MatrixXd XtPX = X.transpose() * PX;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(XtPX);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) {
        throw model_error(
            "rank-deficient weighted design (constant series or collinear "
            "columns)");
    }
    return qr.solve(PX.transpose() * Y);
}

double conditional_loglik(const Eigen::VectorXd& y, const MeanParams& theta,
                          const CovarianceSpec& spec) {
    const int T = spec.T;
    if (static_cast<int>(y.size()) != T) {
        throw input_error("conditional_loglik: series length does not match spec");
    }
    const auto blocks = spec.blocks();
    const Eigen::MatrixXd X = design_matrix(spec.q, T);
    Eigen::Vector4d th(theta.beta0, theta.beta1, theta.delta, theta.bigdelta);
    const Eigen::VectorXd r = y.tail(T - 1) - X * th;
    const double quad = (r.transpose() * apply_precision(blocks, r))(0);
    constexpr double log2pi = 1.8378770664093454836;
    return -0.5 * ((T - 1) * log2pi + log_det(blocks) + quad);
}

UnitFit fit_unit(const Eigen::VectorXd& y, int q, double tol, int max_iter) {
    if (!(tol > 0.0)) throw input_error("fit_unit: tol must be positive");
    const int T = static_cast<int>(y.size());
    const Eigen::MatrixXd X = design_matrix(q, T);
    const Eigen::VectorXd Y = y.tail(T - 1);

    // OLS start (identity weights).
    std::vector<ArBlock> identity{{q - 2, 0.0, 1.0}, {T - q + 1, 0.0, 1.0}};
    Eigen::VectorXd th = gls_solve(X, Y, identity);
    const Eigen::VectorXd r0 = Y - X * th;

    UnitFit fit;
    fit.converged = false;
    auto record = [&](const Eigen::VectorXd& t, const ArPhaseParams& p) {
        fit.theta = MeanParams{t(0), t(1), t(2), t(3)};
        fit.ar = p;
        fit.loglik_trace.push_back(
            conditional_loglik(y, fit.theta, CovarianceSpec{q, T, p}));
    };

    // Residuals at rounding-error scale carry spurious autocorrelation that
    // would push phi toward the clamp and make the weighted design singular.
    // Treat such a fit as exact white noise and stop.
    if (r0.cwiseAbs().maxCoeff() <=
        1e-9 * std::max(1.0, Y.cwiseAbs().maxCoeff())) {
        const double sd = std::sqrt(r0.squaredNorm() / r0.size());
        record(th, ArPhaseParams{0.0, 0.0, std::max(sd, kSigmaFloor),
                                 std::max(sd, kSigmaFloor)});
        fit.converged = true;
        fit.loglik = fit.loglik_trace.back();
        return fit;
    }

    ArPhaseParams phases = estimate_ar_phases_lenient(r0, q);
    record(th, phases);

    for (int it = 1; it <= max_iter; ++it) {
        fit.iterations = it;
        const CovarianceSpec spec{q, T, phases};
        // A phi estimate at the clamp (structured residuals at a poor
        // candidate) can make the weighted design numerically singular; keep
        // the last valid iterate rather than aborting the grid search.
        try {
            th = gls_solve(X, Y, spec.blocks());
        } catch (const model_error&) {
            break;
        }
        const ArPhaseParams next = estimate_ar_phases_lenient(Y - X * th, q);
        const double step = std::hypot(next.phi1 - phases.phi1,
                                       next.phi2 - phases.phi2);
        phases = next;
        record(th, phases);
        if (step < tol) {
            fit.converged = true;
            break;
        }
    }
    fit.loglik = fit.loglik_trace.back();
    return fit;
}

FitResult fit_panel(const Panel& panel, const ChangePointWindow& window,
                    double tol, int max_iter) {
    window.validate(panel.T);
    FitResult result;
    result.window = window;
    result.T = panel.T;

    double best = -std::numeric_limits<double>::infinity();
    for (int q : window.candidates) {
        std::vector<UnitFit> fits;
        fits.reserve(panel.J);
        double total = 0.0;
        for (int j = 0; j < panel.J; ++j) {
            try {
                fits.push_back(fit_unit(panel.values.row(j).transpose(), q, tol,
                                        max_iter));
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "unit " << panel.unit_names[j] << " (j=" << j
                   << "), q=" << q << ": " << e.what();
                throw model_error(os.str());
            }
            total += fits.back().loglik;
        }
        result.profile[q] = total;
        if (total > best) {  // strict: ties keep the smallest q
            best = total;
            result.tau_hat = q;
            result.unit_fits = std::move(fits);
        }
    }
    return result;
}

}  // namespace mits
