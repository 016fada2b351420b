#pragma once

#include "mits/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mits {

// Wide CSV panel: header `time,<unit_1>,...,<unit_J>`, one row per time
// index. The time column is either the integers 1..T or ISO month strings
// (YYYY-MM) with no gaps; labels map to indices by position.
struct LoadedPanel {
    Panel panel;
    std::vector<std::string> time_labels;  // size T

    const std::string& label_for(int t) const;  // t in 1..T
};

LoadedPanel read_panel_csv(const std::string& path);
LoadedPanel read_panel_csv(std::istream& in, const std::string& source_name);

void write_panel_csv(const std::string& path, const LoadedPanel& panel);
void write_panel_csv(std::ostream& out, const LoadedPanel& panel);

// Bundled synthetic five-unit demo panel with a known change point at t=29
// and a strong post-change slope shift.
inline constexpr int kDemoTau = 29;
inline constexpr int kDemoIntervention = 31;
LoadedPanel generate_demo_panel(std::uint64_t seed = 20080101);

}  // namespace mits
