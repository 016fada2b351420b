#pragma once

#include "mits/inference.hpp"
#include "mits/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace mits {

// One Monte Carlo data-generating regime. tau_true empty means the null
// (single regime, no change point); a null scenario requires all shift
// parameters to be zero.
struct SimScenario {
    int J = 1;
    int T = 60;
    double phi = 0.1;
    double sigma_w = 3.38;
    std::vector<MeanParams> theta_per_unit;
    std::optional<int> tau_true;
    ChangePointWindow window;
    int replicates = 2000;
    int replicate_offset = 0;  // global index of the first replicate
    std::uint64_t seed = 0;
    double alpha = 0.05;

    void validate() const;
    // Seed for global replicate index rep; independent of replicates,
    // replicate_offset and execution order.
    std::uint64_t replicate_seed(int rep) const;
};

struct SimOutcome {
    double rejection_rate = 0.0;
    double exact_recovery_rate = 0.0;
    double exact_recovery_rate_rejecting = 0.0;
    double mc_standard_error = 0.0;  // of the rejection rate
    std::vector<std::uint8_t> rejected_flags;
    std::vector<std::uint8_t> exact_flags;
};

// Paper-style default mean parameters: unit 0 is (65, 0.5); later units are
// offset slightly.
MeanParams default_theta(int unit_index);
std::vector<MeanParams> default_thetas(int J);

// Scenario with the mid-series change point and window used throughout the
// simulation studies: T=60 -> tau 30, Q={25..34}; T=120 -> tau 60, Q={50..69}.
SimScenario standard_scenario(int J, int T, double phi, bool with_change);

SimOutcome run_type1(const SimScenario& scenario);
SimOutcome run_alternative(const SimScenario& scenario);

std::vector<std::pair<double, SimOutcome>> run_power(
    const SimScenario& scenario, const std::vector<double>& slope_grid);
std::vector<std::pair<double, double>> run_accuracy(
    const SimScenario& scenario, const std::vector<double>& slope_grid);

// Slope-change grid from the simulation studies:
// {0, 0.01, ..., 0.25, 0.30, ..., 0.45}.
std::vector<double> full_slope_grid();

// Replicate loop helper; honors the MITS_THREADS environment variable
// (default: hardware concurrency). fn(i) must be independent across i.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace mits
