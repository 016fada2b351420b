#pragma once

#include "mits/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mits {

// Canned simulation studies emitted as CSV files, suitable for external
// plotting. `regime_filter` empty runs every regime; otherwise one of
// T60_phi01, T60_phi06, T120_phi01, T120_phi06.
struct PresetOptions {
    int replicates = 2000;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    std::string out_dir = ".";
    std::string regime_filter;
};

struct Regime {
    int T = 0;
    double phi = 0.0;
    std::string name;
};

std::vector<Regime> all_regimes();

// Type-I error grid (phi x T x J) -> table1.csv (matrix layout) and
// table1_detail.csv (tidy, with Monte Carlo standard errors).
std::vector<std::string> emit_table1(const PresetOptions& opts);

// Power curves over the slope-change grid -> power_<regime>_J<j>.csv.
std::vector<std::string> emit_figure3(const PresetOptions& opts);

// Change-point exact-recovery curves -> accuracy_<regime>_J<j>.csv.
std::vector<std::string> emit_figure4(const PresetOptions& opts);

}  // namespace mits
