#include "mits/io.hpp"

#include "mits/ar.hpp"
#include "mits/errors.hpp"
#include "mits/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mits {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_int(const std::string& s, int& out) {
    const std::string t = trim(s);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc{} && p == t.data() + t.size();
}

// YYYY-MM -> months since year 0; returns false if not a month label.
bool parse_month(const std::string& s, int& out) {
    const std::string t = trim(s);
    if (t.size() != 7 || t[4] != '-') return false;
    int year = 0, month = 0;
    if (!parse_int(t.substr(0, 4), year) || !parse_int(t.substr(5, 2), month)) {
        return false;
    }
    if (month < 1 || month > 12) return false;
    out = year * 12 + (month - 1);
    return true;
}

[[noreturn]] void cell_error(const std::string& source, int line, int column,
                             const std::string& what) {
    std::ostringstream os;
    os << source << ":" << line << ": column " << column << ": " << what;
    throw input_error(os.str());
}

}  // namespace

const std::string& LoadedPanel::label_for(int t) const {
    if (t < 1 || t > panel.T) {
        throw input_error("label_for: time index out of range");
    }
    return time_labels[t - 1];
}

LoadedPanel read_panel_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line)) {
        throw input_error(source_name + ": empty file");
    }
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || trim(header[0]) != "time") {
        throw input_error(source_name +
                          ":1: header must be `time,<unit_1>,...`");
    }
    const int J = static_cast<int>(header.size()) - 1;
    std::vector<std::string> unit_names;
    for (int j = 1; j <= J; ++j) {
        const std::string name = trim(header[j]);
        if (name.empty()) cell_error(source_name, 1, j + 1, "empty unit name");
        unit_names.push_back(name);
    }

    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    bool months = false;
    int prev_time = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != J + 1) {
            std::ostringstream os;
            os << "expected " << (J + 1) << " cells, found " << cells.size();
            cell_error(source_name, line_no, static_cast<int>(cells.size()) + 1,
                       os.str());
        }
        const std::string label = trim(cells[0]);
        int time_value = 0;
        const int row_index = static_cast<int>(labels.size());
        if (parse_int(label, time_value)) {
            if (row_index == 0) {
                months = false;
                if (time_value != 1) {
                    cell_error(source_name, line_no, 1,
                               "integer time must start at 1");
                }
            } else if (months || time_value != prev_time + 1) {
                cell_error(source_name, line_no, 1,
                           "time must increase by 1 with no gaps");
            }
        } else if (parse_month(label, time_value)) {
            if (row_index == 0) {
                months = true;
            } else if (!months || time_value != prev_time + 1) {
                cell_error(source_name, line_no, 1,
                           "month labels must be consecutive with no gaps");
            }
        } else {
            cell_error(source_name, line_no, 1,
                       "time must be an integer or YYYY-MM month");
        }
        prev_time = time_value;
        labels.push_back(label);

        std::vector<double> row(J);
        for (int j = 0; j < J; ++j) {
            const std::string cell = trim(cells[j + 1]);
            if (cell.empty()) {
                cell_error(source_name, line_no, j + 2,
                           "missing value for unit `" + unit_names[j] + "`");
            }
            try {
                std::size_t used = 0;
                row[j] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                cell_error(source_name, line_no, j + 2,
                           "cannot parse `" + cell + "` as a number");
            }
            if (!std::isfinite(row[j])) {
                cell_error(source_name, line_no, j + 2, "non-finite value");
            }
        }
        rows.push_back(std::move(row));
    }

    const int T = static_cast<int>(rows.size());
    if (T < 6) {
        throw input_error(source_name + ": panel needs at least 6 time points, found " +
                          std::to_string(T));
    }
    Eigen::MatrixXd values(J, T);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < J; ++j) values(j, t) = rows[t][j];
    }
    LoadedPanel out;
    out.panel = Panel::create(std::move(values), std::move(unit_names),
                              labels.front());
    out.time_labels = std::move(labels);
    return out;
}

LoadedPanel read_panel_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open panel file: " + path);
    return read_panel_csv(in, path);
}

void write_panel_csv(std::ostream& out, const LoadedPanel& panel) {
    out << "time";
    for (const auto& name : panel.panel.unit_names) out << "," << name;
    out << "\n";
    out << std::setprecision(17);
    for (int t = 1; t <= panel.panel.T; ++t) {
        out << panel.time_labels[t - 1];
        for (int j = 0; j < panel.panel.J; ++j) {
            out << "," << panel.panel.values(j, t - 1);
        }
        out << "\n";
    }
}

void write_panel_csv(const std::string& path, const LoadedPanel& panel) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open output file: " + path);
    write_panel_csv(out, panel);
}

LoadedPanel generate_demo_panel(std::uint64_t seed) {
    const int T = 60;
    const int J = 5;
    const std::vector<std::string> names{"unit_a", "unit_b", "unit_c", "unit_d",
                                         "unit_e"};
    Eigen::MatrixXd values(J, T);
    for (int j = 0; j < J; ++j) {
        MeanParams theta{64.0 + 1.5 * j, 0.4 + 0.05 * j, 3.0, 0.6};
        ArPhaseParams ar{0.1, 0.2, 2.0, 1.8};
        values.row(j) =
            simulate_series(theta, kDemoTau, ar, T, combine_seed(seed, j))
                .transpose();
    }
    LoadedPanel out;
    out.panel = Panel::create(std::move(values), names, "2008-01");
    int year = 2008, month = 1;
    for (int t = 0; t < T; ++t) {
        std::ostringstream os;
        os << year << "-" << std::setw(2) << std::setfill('0') << month;
        out.time_labels.push_back(os.str());
        if (++month > 12) {
            month = 1;
            ++year;
        }
    }
    return out;
}

}  // namespace mits
