#include "mits/simulate.hpp"

#include "mits/errors.hpp"
#include "mits/fit.hpp"
#include "mits/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace mits {

namespace {

struct ReplicateResult {
    bool rejected = false;
    bool exact = false;
};

// One replicate: simulate the panel, then share the per-(unit, q) full fits
// between the likelihood profile (tau_hat) and the Wald scan. Numerically
// identical to calling fit_panel and supremum_wald_test separately.
ReplicateResult run_replicate(const SimScenario& s, int rep) {
    const std::uint64_t rep_seed = s.replicate_seed(rep);
    ArPhaseParams ar{s.phi, s.phi, s.sigma_w, s.sigma_w};

    std::vector<Eigen::VectorXd> series;
    series.reserve(s.J);
    for (int j = 0; j < s.J; ++j) {
        series.push_back(simulate_series(s.theta_per_unit[j], s.tau_true, ar,
                                         s.T, combine_seed(rep_seed, j)));
    }

    std::vector<ReducedFit> reduced;
    reduced.reserve(s.J);
    for (int j = 0; j < s.J; ++j) reduced.push_back(reduced_model_fit(series[j]));

    std::vector<double> raw_p;
    double best_ll = -std::numeric_limits<double>::infinity();
    int tau_hat = 0;
    for (int q : s.window.candidates) {
        double w = 0.0;
        double ll = 0.0;
        for (int j = 0; j < s.J; ++j) {
            const UnitFit full = fit_unit(series[j], q);
            w += unit_wald_term(series[j], q, reduced[j], full);
            ll += full.loglik;
        }
        raw_p.push_back(chi2_sf(w, 2 * s.J));
        if (ll > best_ll) {
            best_ll = ll;
            tau_hat = q;
        }
    }

    // BH step-up decision.
    std::vector<double> sorted = raw_p;
    std::sort(sorted.begin(), sorted.end());
    const int m = static_cast<int>(sorted.size());
    bool reject = false;
    for (int i = m; i >= 1; --i) {
        if (sorted[i - 1] <= s.alpha * i / m) {
            reject = true;
            break;
        }
    }

    ReplicateResult out;
    out.rejected = reject;
    out.exact = s.tau_true && tau_hat == *s.tau_true;
    return out;
}

SimOutcome run_scenario(const SimScenario& s) {
    s.validate();
    SimOutcome out;
    out.rejected_flags.assign(s.replicates, 0);
    out.exact_flags.assign(s.replicates, 0);

    parallel_for(s.replicates, [&](int i) {
        const ReplicateResult r = run_replicate(s, s.replicate_offset + i);
        out.rejected_flags[i] = r.rejected ? 1 : 0;
        out.exact_flags[i] = r.exact ? 1 : 0;
    });

    int n_reject = 0, n_exact = 0, n_exact_rej = 0;
    for (int i = 0; i < s.replicates; ++i) {
        n_reject += out.rejected_flags[i];
        n_exact += out.exact_flags[i];
        if (out.rejected_flags[i] && out.exact_flags[i]) ++n_exact_rej;
    }
    const double n = static_cast<double>(s.replicates);
    out.rejection_rate = n_reject / n;
    out.exact_recovery_rate = n_exact / n;
    out.exact_recovery_rate_rejecting =
        n_reject > 0 ? static_cast<double>(n_exact_rej) / n_reject : 0.0;
    out.mc_standard_error =
        std::sqrt(out.rejection_rate * (1.0 - out.rejection_rate) / n);
    return out;
}

}  // namespace

void SimScenario::validate() const {
    if (J < 1) throw input_error("scenario: J must be >= 1");
    if (static_cast<int>(theta_per_unit.size()) != J) {
        throw input_error("scenario: theta_per_unit size must equal J");
    }
    if (replicates < 1) throw input_error("scenario: replicates must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw input_error("scenario: alpha must lie in (0, 1]");
    }
    window.validate(T);
    if (!tau_true) {
        for (const auto& th : theta_per_unit) {
            if (th.delta != 0.0 || th.bigdelta != 0.0) {
                throw input_error(
                    "null scenario requires delta = Delta = 0 for every unit");
            }
        }
    } else if (*tau_true < 4 || *tau_true > T - 2) {
        throw input_error("scenario: tau_true outside [4, T-2]");
    }
}

std::uint64_t SimScenario::replicate_seed(int rep) const {
    std::ostringstream os;
    os << "J=" << J << ";T=" << T << ";phi=" << phi << ";sw=" << sigma_w
       << ";alpha=" << alpha << ";tau=" << (tau_true ? *tau_true : -1) << ";Q=";
    for (int q : window.candidates) os << q << ",";
    os << ";theta=";
    for (const auto& th : theta_per_unit) {
        os << th.beta0 << "," << th.beta1 << "," << th.delta << ","
           << th.bigdelta << ";";
    }
    const std::uint64_t fp = fnv1a(os.str());
    return combine_seed(combine_seed(seed, fp), static_cast<std::uint64_t>(rep));
}

MeanParams default_theta(int unit_index) {
    return MeanParams{65.0 + 0.5 * unit_index, 0.5 + 0.01 * unit_index, 0.0,
                      0.0};
}

std::vector<MeanParams> default_thetas(int J) {
    std::vector<MeanParams> out;
    out.reserve(J);
    for (int j = 0; j < J; ++j) out.push_back(default_theta(j));
    return out;
}

SimScenario standard_scenario(int J, int T, double phi, bool with_change) {
    if (T != 60 && T != 120) {
        throw input_error("standard_scenario: T must be 60 or 120");
    }
    SimScenario s;
    s.J = J;
    s.T = T;
    s.phi = phi;
    s.theta_per_unit = default_thetas(J);
    const int tau = T / 2;
    s.window = (T == 60) ? ChangePointWindow::explicit_range(25, 34, T, tau)
                         : ChangePointWindow::explicit_range(50, 69, T, tau);
    if (with_change) s.tau_true = tau;
    return s;
}

std::vector<double> full_slope_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 25; ++i) grid.push_back(i * 0.01);
    for (int i = 30; i <= 45; i += 5) grid.push_back(i * 0.01);
    return grid;
}

SimOutcome run_type1(const SimScenario& scenario) {
    if (scenario.tau_true) {
        throw input_error("run_type1 requires a null scenario (no tau_true)");
    }
    return run_scenario(scenario);
}

SimOutcome run_alternative(const SimScenario& scenario) {
    if (!scenario.tau_true) {
        throw input_error("run_alternative requires tau_true");
    }
    return run_scenario(scenario);
}

std::vector<std::pair<double, SimOutcome>> run_power(
    const SimScenario& scenario, const std::vector<double>& slope_grid) {
    if (!scenario.tau_true) throw input_error("run_power requires tau_true");
    std::vector<std::pair<double, SimOutcome>> out;
    for (double slope : slope_grid) {
        SimScenario s = scenario;
        for (auto& th : s.theta_per_unit) {
            th.delta = 0.0;
            th.bigdelta = slope;
        }
        out.emplace_back(slope, run_scenario(s));
    }
    return out;
}

std::vector<std::pair<double, double>> run_accuracy(
    const SimScenario& scenario, const std::vector<double>& slope_grid) {
    if (!scenario.tau_true) throw input_error("run_accuracy requires tau_true");
    std::vector<std::pair<double, double>> out;
    for (double slope : slope_grid) {
        SimScenario s = scenario;
        for (auto& th : s.theta_per_unit) {
            th.delta = 0.0;
            th.bigdelta = slope;
        }
        out.emplace_back(slope, run_scenario(s).exact_recovery_rate);
    }
    return out;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MITS_THREADS")) {
        workers = std::max(1, std::atoi(env));
    }
    workers = std::clamp(workers, 1, std::max(1, n));

    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace mits
