#include "mits/inference.hpp"

#include "mits/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mits {

namespace {

constexpr double kZ975 = 1.959963984540054;

ParamInference make_inference(double estimate, double variance) {
    ParamInference p;
    p.estimate = estimate;
    p.se = std::sqrt(std::max(variance, 0.0));
    p.ci_low = estimate - kZ975 * p.se;
    p.ci_high = estimate + kZ975 * p.se;
    p.p_value = p.se > 0.0 ? normal_two_sided_p(estimate / p.se)
                           : (estimate == 0.0 ? 1.0 : 0.0);
    return p;
}

}  // namespace

double chi2_sf(double x, int dof) {
    if (x <= 0.0) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, x));
}

double normal_two_sided_p(double z) {
    boost::math::normal dist;
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(z)));
}

double SwtReport::min_raw_p() const {
    double m = 1.0;
    for (const auto& e : per_q) m = std::min(m, e.raw_p);
    return m;
}

double SwtReport::min_adjusted_p() const {
    double m = 1.0;
    for (double p : adjusted_p) m = std::min(m, p);
    return m;
}

ReducedFit reduced_model_fit(const Eigen::VectorXd& y, double tol,
                             int max_iter) {
    const int T = static_cast<int>(y.size());
    if (T < 6) throw input_error("reduced_model_fit: T must be at least 6");
    if (!(tol > 0.0)) throw input_error("reduced_model_fit: tol must be positive");

    Eigen::MatrixXd X(T - 1, 2);
    for (int t = 2; t <= T; ++t) {
        X(t - 2, 0) = 1.0;
        X(t - 2, 1) = static_cast<double>(t);
    }
    const Eigen::VectorXd Y = y.tail(T - 1);

    auto estimate = [&](const Eigen::VectorXd& r) -> SinglePhaseEstimate {
        try {
            return estimate_ar_single(r);
        } catch (const model_error&) {
            const double sd = std::sqrt(
                (r.array() - r.mean()).square().sum() / r.size());
            return {0.0, std::max(sd, kSigmaFloor)};
        }
    };

    std::vector<ArBlock> identity{{T - 1, 0.0, 1.0}};
    Eigen::VectorXd th = gls_solve(X, Y, identity);
    const Eigen::VectorXd r0 = Y - X * th;

    ReducedFit fit;
    // An exact straight line leaves rounding-error residuals whose spurious
    // autocorrelation would drive phi to the clamp; treat as white noise.
    if (r0.cwiseAbs().maxCoeff() <=
        1e-9 * std::max(1.0, Y.cwiseAbs().maxCoeff())) {
        fit.intercept = th(0);
        fit.slope = th(1);
        fit.phi = 0.0;
        fit.sigma_w = std::max(std::sqrt(r0.squaredNorm() / r0.size()),
                               kSigmaFloor);
        fit.converged = true;
        return fit;
    }

    SinglePhaseEstimate est = estimate(r0);
    for (int it = 1; it <= max_iter; ++it) {
        fit.iterations = it;
        std::vector<ArBlock> blocks{{T - 1, est.phi, est.sigma_w}};
        try {
            th = gls_solve(X, Y, blocks);
        } catch (const model_error&) {
            break;
        }
        const SinglePhaseEstimate next = estimate(Y - X * th);
        const double step = std::abs(next.phi - est.phi);
        est = next;
        if (step < tol) {
            fit.converged = true;
            break;
        }
    }
    fit.intercept = th(0);
    fit.slope = th(1);
    fit.phi = est.phi;
    fit.sigma_w = est.sigma_w;
    return fit;
}

double unit_wald_term(const Eigen::VectorXd& y, int q, const ReducedFit& red,
                      const UnitFit& full) {
    const int T = static_cast<int>(y.size());
    const std::vector<ArBlock> blocks{{T - 1, red.phi, red.sigma_w}};
    const Eigen::MatrixXd X1 = design_matrix(q, T);
    const Eigen::Matrix4d XtPX = X1.transpose() * apply_precision(blocks, X1);
    Eigen::FullPivLU<Eigen::Matrix4d> lu(XtPX);
    if (!lu.isInvertible()) {
        throw model_error("wald_statistic: singular weighted design at q=" +
                          std::to_string(q));
    }
    const Eigen::Matrix4d V = lu.inverse();
    const Eigen::Matrix2d Vsub = V.block<2, 2>(2, 2);
    Eigen::FullPivLU<Eigen::Matrix2d> lu2(Vsub);
    if (!lu2.isInvertible()) {
        throw model_error(
            "wald_statistic: singular shift-parameter covariance at q=" +
            std::to_string(q));
    }
    const Eigen::Vector2d b(full.theta.delta, full.theta.bigdelta);
    return b.dot(lu2.inverse() * b);
}

double wald_statistic(const Panel& panel, int q, double tol, int max_iter) {
    if (q < 4 || q > panel.T - 2) {
        throw input_error("wald_statistic: q=" + std::to_string(q) +
                          " outside [4, T-2]");
    }
    double w = 0.0;
    for (int j = 0; j < panel.J; ++j) {
        const Eigen::VectorXd y = panel.values.row(j).transpose();
        const ReducedFit red = reduced_model_fit(y, tol, max_iter);
        const UnitFit full = fit_unit(y, q, tol, max_iter);
        w += unit_wald_term(y, q, red, full);
    }
    return w;
}

std::vector<double> bh_adjust(const std::vector<double>& raw_p) {
    const int m = static_cast<int>(raw_p.size());
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return raw_p[a] < raw_p[b]; });

    std::vector<double> adjusted(m);
    double running = 1.0;
    for (int i = m - 1; i >= 0; --i) {
        const double scaled = raw_p[order[i]] * m / (i + 1);
        running = std::min(running, scaled);
        adjusted[order[i]] = running;
    }
    return adjusted;
}

SwtReport supremum_wald_test(const Panel& panel,
                             const ChangePointWindow& window, double alpha,
                             double tol, int max_iter) {
    window.validate(panel.T);
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw input_error("supremum_wald_test: alpha must lie in (0, 1]");
    }

    SwtReport report;
    report.alpha = alpha;
    report.dof = 2 * panel.J;

    std::vector<ReducedFit> reduced;
    reduced.reserve(panel.J);
    for (int j = 0; j < panel.J; ++j) {
        reduced.push_back(
            reduced_model_fit(panel.values.row(j).transpose(), tol, max_iter));
    }

    std::vector<double> raw;
    for (int q : window.candidates) {
        double w = 0.0;
        for (int j = 0; j < panel.J; ++j) {
            const Eigen::VectorXd y = panel.values.row(j).transpose();
            const UnitFit full = fit_unit(y, q, tol, max_iter);
            w += unit_wald_term(y, q, reduced[j], full);
        }
        report.per_q.push_back({q, w, chi2_sf(w, report.dof)});
        raw.push_back(report.per_q.back().raw_p);
    }

    report.adjusted_p = bh_adjust(raw);

    // Step-up: largest i with p_(i) <= (i/m) * alpha.
    const int m = static_cast<int>(raw.size());
    std::vector<double> sorted = raw;
    std::sort(sorted.begin(), sorted.end());
    for (int i = m; i >= 1; --i) {
        const double thr = alpha * i / m;
        if (sorted[i - 1] <= thr) {
            report.bh_threshold = thr;
            report.reject = true;
            break;
        }
    }
    return report;
}

std::vector<UnitInference> param_inference(const FitResult& fit) {
    std::vector<UnitInference> out;
    out.reserve(fit.unit_fits.size());
    const Eigen::MatrixXd X = design_matrix(fit.tau_hat, fit.T);
    for (std::size_t j = 0; j < fit.unit_fits.size(); ++j) {
        const UnitFit& u = fit.unit_fits[j];
        if (!u.converged) {
            std::ostringstream os;
            os << "param_inference refused: unit " << j
               << " did not converge within " << u.iterations << " iterations";
            throw model_error(os.str());
        }
        const CovarianceSpec spec{fit.tau_hat, fit.T, u.ar};
        const Eigen::Matrix4d XtPX =
            X.transpose() * apply_precision(spec.blocks(), X);
        Eigen::FullPivLU<Eigen::Matrix4d> lu(XtPX);
        if (!lu.isInvertible()) {
            throw model_error("param_inference: singular weighted design");
        }
        const Eigen::Matrix4d V = lu.inverse();

        UnitInference inf;
        inf.beta0 = make_inference(u.theta.beta0, V(0, 0));
        inf.beta1 = make_inference(u.theta.beta1, V(1, 1));
        inf.delta = make_inference(u.theta.delta, V(2, 2));
        inf.bigdelta = make_inference(u.theta.bigdelta, V(3, 3));
        const double tau = static_cast<double>(fit.tau_hat);
        const double lc = u.theta.delta + u.theta.bigdelta * tau;
        const double lc_var = V(2, 2) + tau * tau * V(3, 3) + 2.0 * tau * V(2, 3);
        inf.level_change = make_inference(lc, lc_var);
        out.push_back(inf);
    }
    return out;
}

}  // namespace mits
