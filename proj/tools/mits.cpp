#include "mits/errors.hpp"
#include "mits/fit.hpp"
#include "mits/inference.hpp"
#include "mits/io.hpp"
#include "mits/presets.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace {

using nlohmann::json;

struct WindowFlags {
    std::string window_spec;      // "m,k" around the intervention time
    std::string candidates_spec;  // "a..b"
    std::optional<int> intervention;
};

void add_window_flags(CLI::App* cmd, WindowFlags& flags) {
    cmd->add_option("--window", flags.window_spec,
                    "candidate window as m,k around --intervention");
    cmd->add_option("--candidates", flags.candidates_spec,
                    "explicit candidate range a..b");
    cmd->add_option("--intervention", flags.intervention,
                    "formal intervention time t*");
}

mits::ChangePointWindow resolve_window(const WindowFlags& flags, int T) {
    if (!flags.window_spec.empty() && !flags.candidates_spec.empty()) {
        throw mits::input_error("--window and --candidates are mutually exclusive");
    }
    if (!flags.window_spec.empty()) {
        int m = 0, k = 0;
        char comma = 0;
        std::istringstream is(flags.window_spec);
        if (!(is >> m >> comma >> k) || comma != ',') {
            throw mits::input_error("--window expects m,k");
        }
        if (!flags.intervention) {
            throw mits::input_error("--window requires --intervention");
        }
        return mits::ChangePointWindow::around(*flags.intervention, m, k, T);
    }
    if (!flags.candidates_spec.empty()) {
        const auto dots = flags.candidates_spec.find("..");
        if (dots == std::string::npos) {
            throw mits::input_error("--candidates expects a..b");
        }
        const int a = std::stoi(flags.candidates_spec.substr(0, dots));
        const int b = std::stoi(flags.candidates_spec.substr(dots + 2));
        const int t_star = flags.intervention.value_or((a + b) / 2);
        return mits::ChangePointWindow::explicit_range(a, b, T, t_star);
    }
    throw mits::input_error("one of --window or --candidates is required");
}

json inference_json(const mits::ParamInference& p) {
    return {{"estimate", p.estimate},
            {"se", p.se},
            {"ci_low", p.ci_low},
            {"ci_high", p.ci_high},
            {"p_value", p.p_value}};
}

std::string fmt_ci(const mits::ParamInference& p) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << p.estimate << " ("
       << p.ci_low << ", " << p.ci_high << ") p=" << p.p_value;
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw mits::input_error("cannot open output file: " + path.string());
    out << body;
}

int cmd_fit(const std::string& panel_path, const WindowFlags& wflags,
            double tol, int max_iter, const std::string& out_dir) {
    const mits::LoadedPanel loaded = mits::read_panel_csv(panel_path);
    const auto window = resolve_window(wflags, loaded.panel.T);
    const mits::FitResult fit =
        mits::fit_panel(loaded.panel, window, tol, max_iter);
    const auto inference = mits::param_inference(fit);

    json report;
    report["tau_hat"] = fit.tau_hat;
    report["tau_hat_label"] = loaded.label_for(fit.tau_hat);
    if (wflags.intervention) {
        report["intervention_time"] = *wflags.intervention;
        report["lag"] = fit.tau_hat - *wflags.intervention;
    }
    report["profile"] = json::array();
    for (const auto& [q, ll] : fit.profile) {
        report["profile"].push_back({{"q", q}, {"loglik", ll}});
    }
    report["units"] = json::array();

    std::ostringstream text;
    text << "change point tau_hat = " << fit.tau_hat << " ("
         << loaded.label_for(fit.tau_hat) << ")\n";
    if (wflags.intervention) {
        text << "intervention t* = " << *wflags.intervention
             << ", lag = " << (fit.tau_hat - *wflags.intervention) << "\n";
    }
    for (int j = 0; j < loaded.panel.J; ++j) {
        const auto& u = fit.unit_fits[j];
        const auto& inf = inference[j];
        json unit;
        unit["name"] = loaded.panel.unit_names[j];
        unit["beta0"] = inference_json(inf.beta0);
        unit["beta1"] = inference_json(inf.beta1);
        unit["delta"] = inference_json(inf.delta);
        unit["bigdelta"] = inference_json(inf.bigdelta);
        unit["level_change"] = inference_json(inf.level_change);
        unit["trend_change"] = inference_json(inf.bigdelta);
        unit["phi_pre"] = u.ar.phi1;
        unit["phi_post"] = u.ar.phi2;
        unit["sd_pre"] = u.ar.response_sd1();
        unit["sd_post"] = u.ar.response_sd2();
        unit["converged"] = u.converged;
        unit["iterations"] = u.iterations;
        report["units"].push_back(unit);

        text << "\nunit " << loaded.panel.unit_names[j] << "\n"
             << "  intercept pre   " << fmt_ci(inf.beta0) << "\n"
             << "  slope pre       " << fmt_ci(inf.beta1) << "\n"
             << "  level change    " << fmt_ci(inf.level_change) << "\n"
             << "  trend change    " << fmt_ci(inf.bigdelta) << "\n"
             << std::fixed << std::setprecision(3)
             << "  adjacent correlation pre/post  " << u.ar.phi1 << " / "
             << u.ar.phi2 << "\n"
             << "  standard deviation pre/post    " << u.ar.response_sd1()
             << " / " << u.ar.response_sd2() << "\n";
    }
    std::cout << text.str();

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        write_text(dir / "fit_report.json", report.dump(2) + "\n");
        std::ostringstream profile;
        profile << "q,loglik\n" << std::setprecision(17);
        for (const auto& [q, ll] : fit.profile) profile << q << "," << ll << "\n";
        write_text(dir / "profile.csv", profile.str());
        write_text(dir / "fit_report.txt", text.str());
    }
    return 0;
}

int cmd_test(const std::string& panel_path, const WindowFlags& wflags,
             double alpha, double tol, int max_iter,
             const std::string& out_dir) {
    const mits::LoadedPanel loaded = mits::read_panel_csv(panel_path);
    const auto window = resolve_window(wflags, loaded.panel.T);
    const mits::SwtReport swt =
        mits::supremum_wald_test(loaded.panel, window, alpha, tol, max_iter);

    json report;
    report["alpha"] = swt.alpha;
    report["dof"] = swt.dof;
    report["reject"] = swt.reject;
    report["verdict"] =
        swt.reject ? "change point exists" : "no change point detected";
    report["bh_threshold"] = swt.bh_threshold;
    report["min_raw_p"] = swt.min_raw_p();
    report["min_adjusted_p"] = swt.min_adjusted_p();
    report["per_q"] = json::array();
    for (std::size_t i = 0; i < swt.per_q.size(); ++i) {
        report["per_q"].push_back({{"q", swt.per_q[i].q},
                                   {"wald", swt.per_q[i].wald_stat},
                                   {"raw_p", swt.per_q[i].raw_p},
                                   {"adjusted_p", swt.adjusted_p[i]}});
    }

    std::cout << "supremum Wald test (alpha=" << alpha << ", dof=" << swt.dof
              << ")\n"
              << "verdict: " << report["verdict"].get<std::string>() << "\n"
              << "min raw p = " << swt.min_raw_p()
              << ", min adjusted p = " << swt.min_adjusted_p() << "\n";
    std::cout << "q,wald,raw_p,adjusted_p\n";
    for (std::size_t i = 0; i < swt.per_q.size(); ++i) {
        std::cout << swt.per_q[i].q << "," << swt.per_q[i].wald_stat << ","
                  << swt.per_q[i].raw_p << "," << swt.adjusted_p[i] << "\n";
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_text(std::filesystem::path(out_dir) / "swt_report.json",
                   report.dump(2) + "\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-unit interrupted time series change-point analysis"};
    app.require_subcommand(1);

    std::string panel_path, out_dir, preset, regime, demo_out = "demo_panel.csv";
    WindowFlags wflags;
    double alpha = 0.05, tol = mits::kDefaultTol;
    int max_iter = mits::kDefaultMaxIter, replicates = 2000;
    std::uint64_t seed = 0;

    auto* fit = app.add_subcommand("fit", "estimate the change point and fits");
    fit->add_option("panel", panel_path, "panel CSV file")->required();
    add_window_flags(fit, wflags);
    fit->add_option("--tol", tol);
    fit->add_option("--max-iter", max_iter);
    fit->add_option("--out", out_dir, "report output directory");

    auto* test = app.add_subcommand("test", "supremum Wald existence test");
    test->add_option("panel", panel_path, "panel CSV file")->required();
    add_window_flags(test, wflags);
    test->add_option("--alpha", alpha);
    test->add_option("--tol", tol);
    test->add_option("--max-iter", max_iter);
    test->add_option("--out", out_dir, "report output directory");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo studies");
    sim->add_option("--preset", preset, "table1, figure3 or figure4")
        ->required()
        ->check(CLI::IsMember({"table1", "figure3", "figure4"}));
    sim->add_option("--regime", regime, "restrict to one regime, e.g. T60_phi01");
    sim->add_option("--replicates", replicates);
    sim->add_option("--seed", seed);
    sim->add_option("--alpha", alpha);
    sim->add_option("--out", out_dir, "output directory")->required();

    auto* demo = app.add_subcommand("demo-data", "write the synthetic demo panel");
    demo->add_option("--out", demo_out, "output CSV path");
    demo->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed()) {
            return cmd_fit(panel_path, wflags, tol, max_iter, out_dir);
        }
        if (test->parsed()) {
            return cmd_test(panel_path, wflags, alpha, tol, max_iter, out_dir);
        }
        if (sim->parsed()) {
            std::filesystem::create_directories(out_dir);
            mits::PresetOptions opts;
            opts.replicates = replicates;
            opts.seed = seed;
            opts.alpha = alpha;
            opts.out_dir = out_dir;
            opts.regime_filter = regime;
            std::vector<std::string> files;
            if (preset == "table1") files = mits::emit_table1(opts);
            if (preset == "figure3") files = mits::emit_figure3(opts);
            if (preset == "figure4") files = mits::emit_figure4(opts);
            for (const auto& f : files) std::cout << "wrote " << f << "\n";
            return 0;
        }
        if (demo->parsed()) {
            mits::write_panel_csv(demo_out,
                                  mits::generate_demo_panel(
                                      seed == 0 ? 20080101 : seed));
            std::cout << "wrote " << demo_out << "\n";
            return 0;
        }
    } catch (const mits::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const mits::model_error& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
