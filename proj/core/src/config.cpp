#include "fecap/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "fecap/csv.hpp"

namespace fecap {

ConfigError::ConfigError(const std::string& msg, int line, int col,
                         std::string key)
    : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) +
                                        ", col " + std::to_string(col) + ")"
                                  : msg),
      line_(line), col_(col), key_(std::move(key)) {}

std::vector<double> logspace(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("logspace: n must be >= 1");
    if (!(lo > 0.0) || !(hi > 0.0))
        throw std::invalid_argument("logspace: bounds must be > 0");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double la = std::log(lo), lb = std::log(hi);
    for (int k = 0; k < n; ++k)
        out[k] = std::exp(la + (lb - la) * k / (n - 1));
    return out;
}

namespace {

const std::map<std::string, double>& unit_table() {
    static const std::map<std::string, double> table = {
        // length
        {"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9},
        // time
        {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12},
        // voltage
        {"V", 1.0}, {"mV", 1e-3}, {"kV", 1e3},
        // frequency
        {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6},
        // electric field
        {"V/m", 1.0}, {"kV/m", 1e3}, {"MV/m", 1e6},
        {"kV/cm", 1e5}, {"MV/cm", 1e8},
        // area
        {"m2", 1.0}, {"cm2", 1e-4}, {"um2", 1e-12},
        // polarization
        {"C/m2", 1.0}, {"uC/cm2", 1e-2},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

double parse_si_value(const std::string& text, const std::string& context,
                      int line, int col) {
    const std::string t = trim(text);
    if (t.empty())
        throw ConfigError("empty value for '" + context + "'", line, col,
                          context);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (end == t.c_str())
        throw ConfigError("not a number in '" + context + "': '" + t + "'",
                          line, col, context);
    std::string suffix = trim(std::string(end));
    if (suffix.empty()) return x;
    const auto it = unit_table().find(suffix);
    if (it == unit_table().end())
        throw ConfigError("unknown unit '" + suffix + "' in '" + context +
                              "': '" + t + "'",
                          line, col, context);
    return x * it->second;
}

RunConfig default_config() {
    RunConfig c;
    // device stack: measured geometry with a calibrated effective interface
    // permittivity (sets the depolarization-feedback strength)
    c.model.stack = StackConfig{};
    // ensemble calibration
    c.model.ensemble = EnsembleConfig{};
    c.model.ensemble.seed = c.seed;
    c.model.ensemble.p_s = c.model.stack.saturation_polarization();
    // trap sheet calibrated so the fully de-trapped bias is 100 kV/cm
    c.model.traps = TrapParams{};
    calibrate_kappa(c.model.traps, c.model.stack, 1e7);

    c.retention.delays = logspace(2e-6, 0.3, 18);

    c.kinetics.amplitudes = {-0.06, -0.08, -0.1, -0.15,
                             -0.25, -0.5, -1.5, -4.5};
    c.kinetics.widths = logspace(1e-6, 1e-1, 11);

    c.sweep.widths = logspace(1e-6, 1e-3, 8);
    c.sweep.amplitudes = {-3.5, -4.0, -4.5, -5.0, -5.5};
    return c;
}

namespace {

struct RawValue {
    std::string text;
    int line = 0;
    int col = 0;
    bool used = false;
};

using RawSection = std::map<std::string, RawValue>;
using RawConfig = std::map<std::string, RawSection>;

RawConfig parse_raw(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section; // "" = top level
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("malformed section header", line_no, 1);
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("empty section name", line_no, 1);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line_no, 1);
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw ConfigError("missing key before '='", line_no, 1);
        const int col = (int)(line.find(key) + 1);
        if (raw[section].count(key))
            throw ConfigError("duplicate key '" + key + "'", line_no, col,
                              key);
        raw[section][key] = {trim(t.substr(eq + 1)), line_no, col, false};
    }
    return raw;
}

class SectionReader {
public:
    SectionReader(RawConfig& raw, std::string name)
        : raw_(raw), name_(std::move(name)) {}

    bool has(const std::string& key) const {
        const auto s = raw_.find(name_);
        return s != raw_.end() && s->second.count(key);
    }

    template <typename F> bool with(const std::string& key, F&& fn) {
        const auto s = raw_.find(name_);
        if (s == raw_.end()) return false;
        const auto v = s->second.find(key);
        if (v == s->second.end()) return false;
        v->second.used = true;
        fn(v->second);
        return true;
    }

    std::string qualify(const std::string& key) const {
        return name_.empty() ? key : name_ + "." + key;
    }

    void num(const std::string& key, double& target) {
        with(key, [&](RawValue& v) {
            target = parse_si_value(v.text, qualify(key), v.line, v.col);
        });
    }

    void integer(const std::string& key, int& target) {
        with(key, [&](RawValue& v) {
            const double x = parse_si_value(v.text, qualify(key), v.line, v.col);
            if (x != std::floor(x))
                throw ConfigError("expected an integer for '" + qualify(key) +
                                      "'",
                                  v.line, v.col, qualify(key));
            target = (int)x;
        });
    }

    void integer64(const std::string& key, std::int64_t& target) {
        with(key, [&](RawValue& v) {
            const double x = parse_si_value(v.text, qualify(key), v.line, v.col);
            if (x != std::floor(x))
                throw ConfigError("expected an integer for '" + qualify(key) +
                                      "'",
                                  v.line, v.col, qualify(key));
            target = (std::int64_t)x;
        });
    }

    void u64(const std::string& key, std::uint64_t& target) {
        with(key, [&](RawValue& v) {
            char* end = nullptr;
            const unsigned long long x = std::strtoull(v.text.c_str(), &end, 10);
            if (end == v.text.c_str() || *end != '\0')
                throw ConfigError("expected an unsigned integer for '" +
                                      qualify(key) + "'",
                                  v.line, v.col, qualify(key));
            target = x;
        });
    }

    void boolean(const std::string& key, bool& target) {
        with(key, [&](RawValue& v) {
            if (v.text == "true") target = true;
            else if (v.text == "false") target = false;
            else
                throw ConfigError("expected true/false for '" + qualify(key) +
                                      "'",
                                  v.line, v.col, qualify(key));
        });
    }

    void str(const std::string& key, std::string& target) {
        with(key, [&](RawValue& v) { target = v.text; });
    }

    void list(const std::string& key, std::vector<double>& target) {
        with(key, [&](RawValue& v) {
            std::vector<double> vals;
            std::stringstream ss(v.text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                vals.push_back(
                    parse_si_value(item, qualify(key), v.line, v.col));
            }
            target = std::move(vals);
        });
    }

    void list64(const std::string& key, std::vector<std::int64_t>& target) {
        std::vector<double> vals;
        bool present = false;
        with(key, [&](RawValue& v) {
            present = true;
            std::stringstream ss(v.text);
            std::string item;
            target.clear();
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                const double x =
                    parse_si_value(item, qualify(key), v.line, v.col);
                if (x != std::floor(x))
                    throw ConfigError("expected integers for '" +
                                          qualify(key) + "'",
                                      v.line, v.col, qualify(key));
                target.push_back((std::int64_t)x);
            }
        });
        (void)present;
        (void)vals;
    }

private:
    RawConfig& raw_;
    std::string name_;
};

void reject_unused(const RawConfig& raw) {
    for (const auto& [section, keys] : raw)
        for (const auto& [key, v] : keys)
            if (!v.used) {
                const std::string full =
                    section.empty() ? key : section + "." + key;
                throw ConfigError("unknown key '" + full + "'", v.line, v.col,
                                  full);
            }
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RawConfig raw = parse_raw(text);
    RunConfig c = default_config();

    SectionReader top(raw, "");
    top.u64("seed", c.seed);
    top.num("dt", c.dt);
    c.model.ensemble.seed = c.seed;

    SectionReader stack(raw, "stack");
    stack.num("alpha", c.model.stack.alpha);
    stack.num("beta", c.model.stack.beta);
    stack.num("theta", c.model.stack.theta);
    stack.num("d_fe", c.model.stack.d_fe);
    stack.num("eps_fe", c.model.stack.eps_fe);
    stack.num("d_int", c.model.stack.d_int);
    stack.num("eps_int", c.model.stack.eps_int);
    stack.num("area", c.model.stack.area);
    stack.num("polarity", c.model.stack.polarity);

    SectionReader ens(raw, "ensemble");
    ens.integer("n_domains", c.model.ensemble.n_domains);
    ens.num("e_act_median", c.model.ensemble.e_act_median);
    ens.num("e_act_log_sigma", c.model.ensemble.e_act_log_sigma);
    ens.num("tau0", c.model.ensemble.tau0);
    ens.num("merz_n", c.model.ensemble.merz_n);
    bool ps_given = ens.has("p_s");
    ens.num("p_s", c.model.ensemble.p_s);
    if (!ps_given && (stack.has("alpha") || stack.has("beta")))
        c.model.ensemble.p_s = c.model.stack.saturation_polarization();

    SectionReader model(raw, "model");
    {
        std::string mode;
        model.str("mode", mode);
        if (!mode.empty()) {
            if (mode == "ensemble") c.model.mode = KineticsMode::ensemble;
            else if (mode == "lk")
                c.model.mode = KineticsMode::landau_khalatnikov;
            else
                throw ConfigError("model.mode must be 'ensemble' or 'lk'");
        }
    }
    model.num("lk_rho", c.model.lk_rho);

    SectionReader traps(raw, "traps");
    const bool kappa_given = traps.has("kappa");
    traps.num("n_v", c.model.traps.n_v);
    traps.num("c0", c.model.traps.c0);
    traps.num("e0", c.model.traps.e0);
    traps.num("v_c", c.model.traps.v_c);
    traps.num("v_e", c.model.traps.v_e);
    traps.num("kappa", c.model.traps.kappa);
    traps.num("f_init", c.model.traps.f_init);
    traps.num("deact_v_on", c.model.traps.deact_v_on);
    traps.num("deact_max", c.model.traps.deact_max);
    traps.num("tau_deact", c.model.traps.tau_deact);
    traps.num("deact_hi_gain", c.model.traps.deact_hi_gain);
    traps.num("tau_deact_rec", c.model.traps.tau_deact_rec);
    double e_bias_target = 0.0;
    traps.num("e_bias_target", e_bias_target);
    if (e_bias_target != 0.0) {
        if (kappa_given)
            throw ConfigError("traps: give either kappa or e_bias_target");
        calibrate_kappa(c.model.traps, c.model.stack, e_bias_target);
    } else if (!kappa_given &&
               (traps.has("n_v") || stack.has("eps_fe"))) {
        calibrate_kappa(c.model.traps, c.model.stack, 1e7);
    }

    SectionReader leak(raw, "leakage");
    leak.num("j0", c.model.leakage.j0);
    leak.num("v0p", c.model.leakage.v0p);
    leak.num("v0n", c.model.leakage.v0n);

    SectionReader pund(raw, "pund");
    pund.num("frequency", c.pund.frequency);
    pund.num("v_max", c.pund.v_max);
    pund.num("v_min", c.pund.v_min);
    pund.num("center", c.pund.center);
    pund.integer("samples_per_sweep", c.pund.samples_per_sweep);

    SectionReader ret(raw, "retention");
    ret.num("preset_v", c.retention.preset_v);
    ret.num("preset_width", c.retention.preset_width);
    ret.num("program_v", c.retention.program_v);
    ret.num("program_width", c.retention.program_width);
    ret.num("read_v", c.retention.read_v);
    ret.num("read_width", c.retention.read_width);
    ret.num("ramp", c.retention.ramp);
    ret.num("read_gap", c.retention.read_gap);
    {
        double dmin = 0.0, dmax = 0.0;
        int dpoints = 0;
        const bool have_range = ret.has("delay_min") || ret.has("delay_max") ||
                                ret.has("delay_points");
        ret.num("delay_min", dmin);
        ret.num("delay_max", dmax);
        ret.integer("delay_points", dpoints);
        if (ret.has("delays") && have_range)
            throw ConfigError(
                "retention: give either delays or delay_min/max/points");
        ret.list("delays", c.retention.delays);
        if (have_range) {
            if (!(dmin > 0.0) || !(dmax > dmin) || dpoints < 2)
                throw ConfigError("retention: bad delay range");
            c.retention.delays = logspace(dmin, dmax, dpoints);
        }
        std::vector<double> sorted = c.retention.delays;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
            sorted != c.retention.delays)
            throw ConfigError("retention.delays must be strictly increasing");
    }

    SectionReader end(raw, "endurance");
    end.integer64("n_cycles", c.endurance.n_cycles);
    end.num("frequency", c.endurance.frequency);
    end.num("v_min", c.endurance.v_min);
    end.num("v_max", c.endurance.v_max);
    end.num("relax_pause", c.endurance.relax_pause);
    end.integer("cycle_steps", c.endurance.cycle_steps);
    end.list64("checkpoints", c.endurance.checkpoints);
    c.endurance.pund = c.pund;

    SectionReader kin(raw, "kinetics");
    kin.list("amplitudes", c.kinetics.amplitudes);
    kin.list("widths", c.kinetics.widths);
    kin.num("preset_v", c.kinetics.preset_v);
    kin.num("preset_width", c.kinetics.preset_width);

    SectionReader sweep(raw, "sweep");
    sweep.list("widths", c.sweep.widths);
    sweep.list("amplitudes", c.sweep.amplitudes);

    SectionReader land(raw, "landscape");
    land.num("d_min", c.landscape.d_min);
    land.num("d_max", c.landscape.d_max);
    land.integer("points", c.landscape.points);

    SectionReader out(raw, "output");
    out.str("dir", c.output.dir);
    out.boolean("write_traces", c.output.write_traces);

    reject_unused(raw);

    // semantic validation names the offending component
    try {
        c.model.validate();
        c.pund.validate();
        c.retention.validate();
        c.endurance.validate();
        c.kinetics.validate();
        if (!(c.landscape.d_max > c.landscape.d_min) || c.landscape.points < 2)
            throw std::invalid_argument("landscape: bad grid");
        if (c.dt < 0.0) throw std::invalid_argument("dt must be >= 0");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

void emit(std::ostream& os, const char* key, double v) {
    os << key << " = " << csv::format_value(v) << "\n";
}

void emit_list(std::ostream& os, const char* key,
               const std::vector<double>& vals) {
    os << key << " = ";
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) os << ", ";
        os << csv::format_value(vals[i]);
    }
    os << "\n";
}

} // namespace

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "seed = " << c.seed << "\n";
    emit(os, "dt", c.dt);

    os << "\n[stack]\n";
    emit(os, "alpha", c.model.stack.alpha);
    emit(os, "beta", c.model.stack.beta);
    emit(os, "theta", c.model.stack.theta);
    emit(os, "d_fe", c.model.stack.d_fe);
    emit(os, "eps_fe", c.model.stack.eps_fe);
    emit(os, "d_int", c.model.stack.d_int);
    emit(os, "eps_int", c.model.stack.eps_int);
    emit(os, "area", c.model.stack.area);
    emit(os, "polarity", c.model.stack.polarity);

    os << "\n[ensemble]\n";
    os << "n_domains = " << c.model.ensemble.n_domains << "\n";
    emit(os, "e_act_median", c.model.ensemble.e_act_median);
    emit(os, "e_act_log_sigma", c.model.ensemble.e_act_log_sigma);
    emit(os, "tau0", c.model.ensemble.tau0);
    emit(os, "merz_n", c.model.ensemble.merz_n);
    emit(os, "p_s", c.model.ensemble.p_s);

    os << "\n[model]\n";
    os << "mode = "
       << (c.model.mode == KineticsMode::ensemble ? "ensemble" : "lk") << "\n";
    emit(os, "lk_rho", c.model.lk_rho);

    os << "\n[traps]\n";
    emit(os, "n_v", c.model.traps.n_v);
    emit(os, "c0", c.model.traps.c0);
    emit(os, "e0", c.model.traps.e0);
    emit(os, "v_c", c.model.traps.v_c);
    emit(os, "v_e", c.model.traps.v_e);
    emit(os, "kappa", c.model.traps.kappa);
    emit(os, "f_init", c.model.traps.f_init);
    emit(os, "deact_v_on", c.model.traps.deact_v_on);
    emit(os, "deact_max", c.model.traps.deact_max);
    emit(os, "tau_deact", c.model.traps.tau_deact);
    emit(os, "deact_hi_gain", c.model.traps.deact_hi_gain);
    emit(os, "tau_deact_rec", c.model.traps.tau_deact_rec);

    os << "\n[leakage]\n";
    emit(os, "j0", c.model.leakage.j0);
    emit(os, "v0p", c.model.leakage.v0p);
    emit(os, "v0n", c.model.leakage.v0n);

    os << "\n[pund]\n";
    emit(os, "frequency", c.pund.frequency);
    emit(os, "v_max", c.pund.v_max);
    emit(os, "v_min", c.pund.v_min);
    emit(os, "center", c.pund.center);
    os << "samples_per_sweep = " << c.pund.samples_per_sweep << "\n";

    os << "\n[retention]\n";
    emit(os, "preset_v", c.retention.preset_v);
    emit(os, "preset_width", c.retention.preset_width);
    emit(os, "program_v", c.retention.program_v);
    emit(os, "program_width", c.retention.program_width);
    emit(os, "read_v", c.retention.read_v);
    emit(os, "read_width", c.retention.read_width);
    emit(os, "ramp", c.retention.ramp);
    emit(os, "read_gap", c.retention.read_gap);
    emit_list(os, "delays", c.retention.delays);

    os << "\n[endurance]\n";
    os << "n_cycles = " << c.endurance.n_cycles << "\n";
    emit(os, "frequency", c.endurance.frequency);
    emit(os, "v_min", c.endurance.v_min);
    emit(os, "v_max", c.endurance.v_max);
    emit(os, "relax_pause", c.endurance.relax_pause);
    os << "cycle_steps = " << c.endurance.cycle_steps << "\n";
    if (!c.endurance.checkpoints.empty()) {
        os << "checkpoints = ";
        for (std::size_t i = 0; i < c.endurance.checkpoints.size(); ++i) {
            if (i) os << ", ";
            os << c.endurance.checkpoints[i];
        }
        os << "\n";
    }

    os << "\n[kinetics]\n";
    emit_list(os, "amplitudes", c.kinetics.amplitudes);
    emit_list(os, "widths", c.kinetics.widths);
    emit(os, "preset_v", c.kinetics.preset_v);
    emit(os, "preset_width", c.kinetics.preset_width);

    os << "\n[sweep]\n";
    emit_list(os, "widths", c.sweep.widths);
    emit_list(os, "amplitudes", c.sweep.amplitudes);

    os << "\n[landscape]\n";
    emit(os, "d_min", c.landscape.d_min);
    emit(os, "d_max", c.landscape.d_max);
    os << "points = " << c.landscape.points << "\n";

    os << "\n[output]\n";
    os << "dir = " << c.output.dir << "\n";
    os << "write_traces = " << (c.output.write_traces ? "true" : "false")
       << "\n";
    return os.str();
}

std::uint64_t config_hash(const RunConfig& config) {
    const std::string text = serialize_config(config);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace fecap
