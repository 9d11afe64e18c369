#include "fecap/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fecap/analysis.hpp"
#include "fecap/csv.hpp"
#include "fecap/instrument.hpp"

namespace fecap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

SimOptions options_from(const RunConfig& config) {
    SimOptions opt;
    opt.dt_override = config.dt;
    return opt;
}

class RunDir {
public:
    RunDir(const std::string& path, bool force) : root_(path) {
        if (fs::exists(root_)) {
            if (!force)
                throw ConfigError("output directory exists: " + path +
                                  " (use --force to overwrite)");
        } else {
            fs::create_directories(root_);
            created_root_ = true;
        }
    }

    std::ofstream open(const std::string& name) {
        const fs::path p = root_ / name;
        std::ofstream out(p);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        files_.push_back(name);
        return out;
    }

    const std::vector<std::string>& files() const { return files_; }
    const fs::path& root() const { return root_; }

    void write_manifest(const std::string& subcommand,
                        const RunConfig& config) {
        json m;
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx",
                      (unsigned long long)config_hash(config));
        m["subcommand"] = subcommand;
        m["config_hash"] = hash;
        m["seed"] = config.seed;
        m["tool"] = "fecap";
        m["version"] = version_string;
        m["files"] = files_;
        auto out = open("manifest.json");
        out << m.dump(2) << "\n";
        // the manifest lists itself last
    }

    void cleanup_on_failure() {
        std::error_code ec;
        for (const auto& f : files_) fs::remove(root_ / f, ec);
        if (created_root_) fs::remove(root_, ec);
    }

private:
    fs::path root_;
    bool created_root_ = false;
    std::vector<std::string> files_;
};

void write_landscape_csv(std::ofstream& out,
                         const std::vector<std::pair<double, double>>& curve) {
    out << "D_C_per_m2,F_J_per_m3\n";
    for (const auto& [d, f] : curve) {
        csv::write_value(out, d);
        out << ',';
        csv::write_value(out, f);
        out << '\n';
    }
}

void write_loop_csv(std::ofstream& out, const PolLoop& loop) {
    out << "V_V,P_C_per_m2\n";
    for (std::size_t k = 0; k < loop.v.size(); ++k) {
        csv::write_value(out, loop.v[k]);
        out << ',';
        csv::write_value(out, loop.p[k]);
        out << '\n';
    }
}

// The three landscape configurations: bare film, film with an interface
// layer, and interface plus fixed-charge bias.
struct LandscapeCase {
    const char* name;
    StackConfig stack;
    double e_bias;
};

std::vector<LandscapeCase> landscape_cases(const StackConfig& base) {
    StackConfig intrinsic = base;
    intrinsic.d_int = 0.0;
    intrinsic.eps_int = 75.0;
    StackConfig interface = base;
    interface.d_int = 0.2e-9;
    interface.eps_int = 75.0;
    return {
        {"intrinsic", intrinsic, 0.0},
        {"interface", interface, 0.0},
        {"interface_bias", interface, -1e7},
    };
}

int do_landscape(const RunConfig& config, RunDir& dir, json& summary) {
    std::vector<double> grid(config.landscape.points);
    const double lo = config.landscape.d_min, hi = config.landscape.d_max;
    for (int k = 0; k < config.landscape.points; ++k)
        grid[k] = lo + (hi - lo) * k / (config.landscape.points - 1);

    for (const auto& lc : landscape_cases(config.model.stack)) {
        const auto curve = landscape_curve(lc.stack, 0.0, lc.e_bias, grid);
        auto out = dir.open(std::string("landscape_") + lc.name + ".csv");
        write_landscape_csv(out, curve);

        const auto pts = stationary_points(lc.stack, 0.0, lc.e_bias);
        json jpts = json::array();
        for (const auto& p : pts) {
            const char* kind = p.kind == Stability::minimum ? "minimum"
                               : p.kind == Stability::maximum ? "maximum"
                                                              : "inflection";
            jpts.push_back({{"d", p.d}, {"kind", kind}});
        }
        summary[std::string(lc.name) + "_stationary_points"] = jpts;
    }
    return 0;
}

int do_pund(const RunConfig& config, RunDir& dir, json& summary) {
    const PundResult res =
        run_pund(config.model, config.pund, options_from(config));
    if (config.output.write_traces) {
        auto out = dir.open("pund_trace.csv");
        res.trace.write_csv(out);
    }
    auto out = dir.open("pund_loop.csv");
    write_loop_csv(out, res.loop);
    summary["pr_pos"] = res.loop.pr_pos;
    summary["pr_neg"] = res.loop.pr_neg;
    summary["two_pr"] = res.loop.pr_pos - res.loop.pr_neg;
    summary["peak_v_pos"] = res.loop.peak_v_pos;
    summary["peak_v_neg"] = res.loop.peak_v_neg;
    return 0;
}

int do_retention(const RunConfig& config, RunDir& dir, json& summary) {
    const RetentionResult res =
        run_retention(config.model, config.retention, options_from(config));
    {
        auto out = dir.open("retention.csv");
        out << "delay_s,P_C_per_m2\n";
        for (const auto& pt : res.points) {
            csv::write_value(out, pt.delay);
            out << ',';
            csv::write_value(out, pt.p);
            out << '\n';
        }
    }
    if (config.output.write_traces) {
        auto out = dir.open("retention_trace_longest.csv");
        res.last_trace.write_csv(out);
    }
    std::vector<double> t, p;
    for (const auto& pt : res.points) {
        t.push_back(pt.delay);
        p.push_back(pt.p);
    }
    const RetentionFit fit = fit_exponential(t, p);
    summary["p0"] = fit.p0;
    summary["p_inf"] = fit.p_inf;
    summary["tau_s"] = fit.tau;
    summary["rmse"] = fit.rmse;
    summary["converged"] = fit.converged;
    summary["tau_identifiable"] = fit.tau_identifiable;
    summary["read_saturated"] = res.read_saturated;
    summary["read_in_bounds"] = res.read_in_bounds;
    return 0;
}

int do_endurance(const RunConfig& config, RunDir& dir, json& summary) {
    const auto series =
        run_endurance(config.model, config.endurance, options_from(config));
    auto out = dir.open("endurance.csv");
    out << "cycles,pr_pos_C_per_m2,pr_neg_C_per_m2,two_pr_C_per_m2,"
           "peak_v_pos_V,peak_v_neg_V\n";
    for (const auto& pt : series) {
        out << pt.cycles << ',';
        csv::write_value(out, pt.pr_pos);
        out << ',';
        csv::write_value(out, pt.pr_neg);
        out << ',';
        csv::write_value(out, pt.pr_pos - pt.pr_neg);
        out << ',';
        csv::write_value(out, pt.peak_v_pos);
        out << ',';
        csv::write_value(out, pt.peak_v_neg);
        out << '\n';
    }
    if (!series.empty()) {
        const double first = series.front().pr_pos - series.front().pr_neg;
        double max_rel = 0.0;
        for (const auto& pt : series)
            max_rel = std::max(
                max_rel,
                std::abs((pt.pr_pos - pt.pr_neg) - first) / std::abs(first));
        summary["two_pr_first"] = first;
        summary["two_pr_last"] =
            series.back().pr_pos - series.back().pr_neg;
        summary["two_pr_max_rel_drift"] = max_rel;
        summary["peak_v_pos_first"] = series.front().peak_v_pos;
        summary["peak_v_pos_last"] = series.back().peak_v_pos;
    }
    return 0;
}

int do_kinetics(const RunConfig& config, RunDir& dir, json& summary) {
    const KineticsResult res =
        run_kinetics(config.model, config.kinetics, options_from(config));
    auto out = dir.open("kinetics.csv");
    out << "width_s";
    for (double a : res.amplitudes) out << ",dP_at_" << csv::format_value(a) << "V";
    out << '\n';
    for (std::size_t iw = 0; iw < res.widths.size(); ++iw) {
        csv::write_value(out, res.widths[iw]);
        for (std::size_t ia = 0; ia < res.amplitudes.size(); ++ia) {
            out << ',';
            csv::write_value(out, res.dp_norm[iw][ia]);
        }
        out << '\n';
    }
    // width needed for half switching, log-interpolated per amplitude
    json w50 = json::array();
    for (std::size_t ia = 0; ia < res.amplitudes.size(); ++ia) {
        double val = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t iw = 1; iw < res.widths.size(); ++iw) {
            const double a = res.dp_norm[iw - 1][ia], b = res.dp_norm[iw][ia];
            if (a < 0.5 && b >= 0.5) {
                const double f = (0.5 - a) / (b - a);
                val = std::exp(std::log(res.widths[iw - 1]) +
                               f * (std::log(res.widths[iw]) -
                                    std::log(res.widths[iw - 1])));
                break;
            }
        }
        w50.push_back(val);
    }
    summary["w50_s"] = w50;
    return 0;
}

int do_sweep(const RunConfig& config, RunDir& dir, json& summary,
             const RunFlags& flags) {
    const auto& widths = config.sweep.widths;
    const auto& amps = config.sweep.amplitudes;
    if (widths.empty() || amps.empty())
        throw ConfigError("sweep: empty grid");

    const std::size_t n_cells = widths.size() * amps.size();
    std::vector<RetentionFit> fits(n_cells);

    unsigned jobs = flags.jobs > 0 ? (unsigned)flags.jobs
                                   : std::thread::hardware_concurrency();
    jobs = std::max(1u, std::min<unsigned>(jobs, n_cells));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_msg;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t cell = next.fetch_add(1);
            if (cell >= n_cells || failed.load()) break;
            const std::size_t iw = cell / amps.size();
            const std::size_t ia = cell % amps.size();
            try {
                RetentionConfig rc = config.retention;
                rc.program_width = widths[iw];
                rc.program_v = amps[ia];
                const RetentionResult res =
                    run_retention(config.model, rc, options_from(config));
                std::vector<double> t, p;
                for (const auto& pt : res.points) {
                    t.push_back(pt.delay);
                    p.push_back(pt.p);
                }
                fits[cell] = fit_exponential(t, p);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                failed = true;
                error_msg = e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed) throw std::runtime_error("sweep cell failed: " + error_msg);

    const TauMap map = build_tau_map(widths, amps, fits);

    auto write_matrix = [&](const std::string& name,
                            const std::vector<std::vector<double>>& m) {
        auto out = dir.open(name);
        out << "width_s";
        for (double a : amps) out << ',' << csv::format_value(a);
        out << '\n';
        for (std::size_t iw = 0; iw < widths.size(); ++iw) {
            csv::write_value(out, widths[iw]);
            for (std::size_t ia = 0; ia < amps.size(); ++ia) {
                out << ',';
                csv::write_value(out, m[iw][ia]);
            }
            out << '\n';
        }
    };
    write_matrix("taumap_tau.csv", map.tau);
    write_matrix("taumap_p_init.csv", map.p_init);

    {
        const auto scatter = correlate_tau_polarization(map);
        auto out = dir.open("sweep_scatter.csv");
        out << "p_init_C_per_m2,tau_s,amplitude_V\n";
        for (const auto& pt : scatter) {
            csv::write_value(out, pt.p_init);
            out << ',';
            csv::write_value(out, pt.tau);
            out << ',';
            csv::write_value(out, pt.amplitude);
            out << '\n';
        }
    }
    summary["cells"] = n_cells;
    summary["jobs"] = jobs;
    return 0;
}

int do_fit(const RunConfig& config, RunDir& dir, json& summary,
           const RunFlags& flags) {
    (void)config;
    if (flags.fit_input.empty())
        throw ConfigError("fit: input CSV path required");
    const csv::Table tab = csv::read_table_file(flags.fit_input);

    int tcol = -1, pcol = -1;
    double pscale = 1.0;
    for (std::size_t k = 0; k < tab.columns.size(); ++k) {
        const std::string& c = tab.columns[k];
        if (c == "t_s" || c == "delay_s") tcol = (int)k;
        if (c == "P_C_per_m2") {
            pcol = (int)k;
            pscale = 1.0;
        }
        if (c == "P_uC_per_cm2") {
            pcol = (int)k;
            pscale = 1e-2;
        }
    }
    if (flags.fit_units == "C/m2") pscale = 1.0;
    else if (flags.fit_units == "uC/cm2") pscale = 1e-2;
    else if (flags.fit_units != "auto")
        throw ConfigError("fit: units must be auto, C/m2 or uC/cm2");
    if (tcol < 0 || pcol < 0)
        throw ConfigError("fit: need columns t_s (or delay_s) and "
                          "P_C_per_m2 or P_uC_per_cm2");

    std::vector<double> t, p;
    for (const auto& row : tab.rows) {
        t.push_back(row[tcol]);
        p.push_back(row[pcol] * pscale);
    }
    const RetentionFit fit = fit_exponential(t, p);
    summary["p0"] = fit.p0;
    summary["p_inf"] = fit.p_inf;
    summary["tau_s"] = fit.tau;
    summary["rmse"] = fit.rmse;
    summary["n_iter"] = fit.n_iter;
    summary["converged"] = fit.converged;
    summary["tau_identifiable"] = fit.tau_identifiable;
    summary["n_samples"] = t.size();
    (void)dir;
    return 0;
}

} // namespace

int run_subcommand(const std::string& name, const RunConfig& config,
                   const RunFlags& flags) {
    const std::string out_path =
        flags.out_dir.empty() ? config.output.dir : flags.out_dir;

    try {
        RunDir dir(out_path, flags.force);
        try {
            json summary;
            summary["subcommand"] = name;
            int rc = 0;
            if (name == "landscape") rc = do_landscape(config, dir, summary);
            else if (name == "pund") rc = do_pund(config, dir, summary);
            else if (name == "retention") rc = do_retention(config, dir, summary);
            else if (name == "endurance") rc = do_endurance(config, dir, summary);
            else if (name == "kinetics") rc = do_kinetics(config, dir, summary);
            else if (name == "sweep") rc = do_sweep(config, dir, summary, flags);
            else if (name == "fit") rc = do_fit(config, dir, summary, flags);
            else throw ConfigError("unknown subcommand: " + name);
            {
                auto out = dir.open("summary.json");
                out << summary.dump(2) << "\n";
            }
            dir.write_manifest(name, config);
            return rc;
        } catch (...) {
            dir.cleanup_on_failure();
            throw;
        }
    } catch (const ConfigError& e) {
        std::cerr << "fecap: config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "fecap: config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fecap: error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace fecap
