#include "winrestart/config.hpp"

#include <fstream>
#include <sstream>

#include "winrestart/errors.hpp"
#include "winrestart/format.hpp"
#include "winrestart/objective.hpp"

namespace winrestart {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_num(const std::string& key, const std::string& value) {
    try {
        return parse_double(value);
    } catch (const Error&) {
        throw ConfigError("config: bad value for '" + key + "': " + value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_num(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config: '" + key + "' must be an integer, got " + value);
    return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config: '" + key + "' must be true or false, got " + value);
}

Vec parse_vec(const std::string& key, const std::string& value) {
    Vec out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) out.push_back(parse_num(key, trim(item)));
    if (out.empty()) throw ConfigError("config: '" + key + "' must hold at least one number");
    return out;
}

std::string vec_to_string(const Vec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    // A file must name gamma explicitly to switch away from the rule form.
    bool saw_gamma = false, saw_rule = false;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not a key = value pair: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty())
            throw ConfigError("config: empty value for '" + key + "'");

        if (key == "n") cfg.n = parse_int(key, value);
        else if (key == "rho") cfg.rho = parse_num(key, value);
        else if (key == "alpha") cfg.alpha = parse_num(key, value);
        else if (key == "beta") cfg.beta = parse_num(key, value);
        else if (key == "gamma") { cfg.gamma = parse_num(key, value); saw_gamma = true; }
        else if (key == "gamma_i") { cfg.gamma_i = parse_int(key, value); saw_rule = true; }
        else if (key == "gamma_eps") { cfg.gamma_eps = parse_num(key, value); saw_rule = true; }
        else if (key == "mode") cfg.mode = value;
        else if (key == "policy") cfg.policy = value;
        else if (key == "horizon") cfg.horizon = parse_num(key, value);
        else if (key == "h_ode") cfg.h_ode = parse_num(key, value);
        else if (key == "event_tol") cfg.event_tol = parse_num(key, value);
        else if (key == "grad_tol") cfg.grad_tol = parse_num(key, value);
        else if (key == "baseline") cfg.baseline = parse_bool(key, value);
        else if (key == "h") cfg.h = parse_num(key, value);
        else if (key == "iters") cfg.iters = parse_int(key, value);
        else if (key == "fit_mode") cfg.fit_mode = value;
        else if (key == "fit_lo") cfg.fit_lo = parse_num(key, value);
        else if (key == "fit_hi") cfg.fit_hi = parse_num(key, value);
        else if (key == "out") cfg.out_dir = value;
        else if (key == "format") cfg.format = value;
        else if (key == "seed") {
            try {
                cfg.seed = std::stoull(value);
            } catch (const std::exception&) {
                throw ConfigError("config: bad value for 'seed': " + value);
            }
        } else if (key == "z0") cfg.z0 = parse_vec(key, value);
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    if (saw_gamma && !saw_rule) {
        cfg.gamma_i.reset();
        cfg.gamma_eps.reset();
    }
    if (saw_gamma && saw_rule)
        throw ConfigError("config: give either 'gamma' or the pair 'gamma_i'/'gamma_eps', "
                          "not both");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "n = " << cfg.n << '\n';
    out << "rho = " << format_double(cfg.rho) << '\n';
    out << "alpha = " << format_double(cfg.alpha) << '\n';
    out << "beta = " << format_double(cfg.beta) << '\n';
    if (cfg.gamma) out << "gamma = " << format_double(*cfg.gamma) << '\n';
    if (cfg.gamma_i) out << "gamma_i = " << *cfg.gamma_i << '\n';
    if (cfg.gamma_eps) out << "gamma_eps = " << format_double(*cfg.gamma_eps) << '\n';
    out << "mode = " << cfg.mode << '\n';
    out << "policy = " << cfg.policy << '\n';
    out << "horizon = " << format_double(cfg.horizon) << '\n';
    out << "h_ode = " << format_double(cfg.h_ode) << '\n';
    out << "event_tol = " << format_double(cfg.event_tol) << '\n';
    out << "grad_tol = " << format_double(cfg.grad_tol) << '\n';
    out << "baseline = " << (cfg.baseline ? "true" : "false") << '\n';
    out << "h = " << format_double(cfg.h) << '\n';
    out << "iters = " << cfg.iters << '\n';
    out << "fit_mode = " << cfg.fit_mode << '\n';
    if (cfg.fit_lo) out << "fit_lo = " << format_double(*cfg.fit_lo) << '\n';
    if (cfg.fit_hi) out << "fit_hi = " << format_double(*cfg.fit_hi) << '\n';
    out << "out = " << cfg.out_dir << '\n';
    out << "format = " << cfg.format << '\n';
    out << "seed = " << cfg.seed << '\n';
    out << "z0 = " << vec_to_string(cfg.z0) << '\n';
    return out.str();
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.n < 1) throw ConfigError("config: 'n' must be >= 1");
    if (!(cfg.rho > 1.0)) throw ConfigError("config: 'rho' must be > 1");
    if (!(cfg.alpha > 0.0)) throw ConfigError("config: 'alpha' must be > 0");
    if (!(cfg.beta >= 0.0)) throw ConfigError("config: 'beta' must be >= 0");
    const bool direct = cfg.gamma.has_value();
    const bool rule = cfg.gamma_i.has_value() || cfg.gamma_eps.has_value();
    if (direct && rule)
        throw ConfigError("config: give either 'gamma' or the pair 'gamma_i'/'gamma_eps', "
                          "not both");
    if (!direct) {
        if (!cfg.gamma_i || !cfg.gamma_eps)
            throw ConfigError("config: the rule form needs both 'gamma_i' and 'gamma_eps'");
        if (*cfg.gamma_i < 0 || *cfg.gamma_i > cfg.n - 1)
            throw ConfigError("config: 'gamma_i' must lie in 0.." + std::to_string(cfg.n - 1));
        if (!(*cfg.gamma_eps > 0.0)) throw ConfigError("config: 'gamma_eps' must be > 0");
    } else if (!(*cfg.gamma > 0.0)) {
        throw ConfigError("config: 'gamma' must be > 0");
    }
    if (cfg.mode != "continuous" && cfg.mode != "discrete")
        throw ConfigError("config: 'mode' must be continuous or discrete");
    if (cfg.policy != "none" && cfg.policy != "speed" && cfg.policy != "warmstart")
        throw ConfigError("config: 'policy' must be none, speed or warmstart");
    if (!(cfg.horizon > 0.0)) throw ConfigError("config: 'horizon' must be > 0");
    if (!(cfg.h_ode > 0.0)) throw ConfigError("config: 'h_ode' must be > 0");
    if (!(cfg.event_tol > 0.0 && cfg.event_tol < cfg.h_ode))
        throw ConfigError("config: 'event_tol' must be positive and below 'h_ode'");
    if (!(cfg.grad_tol >= 0.0)) throw ConfigError("config: 'grad_tol' must be >= 0");
    if (!(cfg.h > 0.0)) throw ConfigError("config: 'h' must be > 0");
    if (cfg.iters < 0) throw ConfigError("config: 'iters' must be >= 0");
    if (cfg.fit_mode != "all" && cfg.fit_mode != "restarts")
        throw ConfigError("config: 'fit_mode' must be all or restarts");
    if (cfg.fit_lo && !(*cfg.fit_lo >= 0.0))
        throw ConfigError("config: 'fit_lo' must be >= 0");
    if (cfg.fit_lo && cfg.fit_hi && !(*cfg.fit_hi > *cfg.fit_lo))
        throw ConfigError("config: 'fit_hi' must exceed 'fit_lo'");
    if (!cfg.fit_lo && cfg.fit_hi && !(*cfg.fit_hi > 0.0))
        throw ConfigError("config: 'fit_hi' must be > 0");
    if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("config: 'format' must be csv or json");
    if (static_cast<int>(cfg.z0.size()) != cfg.n)
        throw ConfigError("config: 'z0' must have exactly n = " + std::to_string(cfg.n) +
                          " components");
}

double resolved_gamma(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.gamma) return *cfg.gamma;
    return gamma_for_oscillation(cfg.alpha, cfg.beta, cfg.rho, *cfg.gamma_i, *cfg.gamma_eps);
}

}  // namespace winrestart
