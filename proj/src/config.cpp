#include "polyhho/config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace polyhho {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, std::size_t line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("line " + std::to_string(line) + ": invalid number '" + v + "' for " + key);
}

int to_int(const std::string& v, std::size_t line, const std::string& key) {
    try {
        std::size_t used = 0;
        const int i = std::stoi(v, &used);
        if (used == v.size()) return i;
    } catch (const std::exception&) {
    }
    throw ConfigError("line " + std::to_string(line) + ": invalid integer '" + v + "' for " + key);
}

}  // namespace

Potential potential_by_id(const std::string& name) {
    const std::string prefix = "poly:";
    if (name.rfind(prefix, 0) != 0) throw ConfigError("psi must have the form poly:<id>, got '" + name + "'");
    Potential p;
    p.id = name.substr(prefix.size());
    if (p.id == "zero") {
        p.psi = [](const Point&) { return 0.; };
        p.grad = [](const Point&) { return Point(0., 0.); };
        p.degree = 0;
    } else if (p.id == "x3") {
        p.psi = [](const Point& x) { return x.x() * x.x() * x.x(); };
        p.grad = [](const Point& x) { return Point(3. * x.x() * x.x(), 0.); };
        p.degree = 3;
    } else if (p.id == "quadratic") {
        p.psi = [](const Point& x) { return 0.5 * x.squaredNorm(); };
        p.grad = [](const Point& x) { return x; };
        p.degree = 2;
    } else if (p.id == "cubic") {
        p.psi = [](const Point& x) { return (x.x() * x.x() * x.x() + x.y() * x.y() * x.y()) / 3.; };
        p.grad = [](const Point& x) { return Point(x.x() * x.x(), x.y() * x.y()); };
        p.degree = 3;
    } else {
        throw ConfigError("unknown potential id '" + p.id + "'");
    }
    return p;
}

RunConfig parse_config_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.resize(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key=value");
        const std::string key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
        if (key == "k") {
            cfg.k = to_int(val, line, key);
            if (cfg.k < 0) throw ConfigError("line " + std::to_string(line) + ": k must be >= 0");
        } else if (key == "nu") {
            cfg.nu = to_double(val, line, key);
            if (!(cfg.nu > 0.)) throw ConfigError("line " + std::to_string(line) + ": nu must be positive");
        } else if (key == "dt0") {
            cfg.solver.dt0 = to_double(val, line, key);
            if (!(cfg.solver.dt0 > 0.)) throw ConfigError("line " + std::to_string(line) + ": dt0 must be positive");
        } else if (key == "stop_tol") {
            cfg.solver.stop_tol = to_double(val, line, key);
        } else if (key == "max_iter") {
            cfg.solver.max_iter = to_int(val, line, key);
        } else if (key == "mode") {
            try {
                cfg.solver.mode = parse_mode(val);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("line " + std::to_string(line) + ": " + e.what());
            }
        } else if (key == "lambda") {
            cfg.lambda = to_double(val, line, key);
        } else if (key == "psi") {
            potential_by_id(val);
            cfg.psi = val;
        } else {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_string(ss.str());
}

std::string to_config_string(const RunConfig& cfg) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "k=" << cfg.k << "\nnu=" << cfg.nu << "\ndt0=" << cfg.solver.dt0 << "\nstop_tol=" << cfg.solver.stop_tol
        << "\nmax_iter=" << cfg.solver.max_iter << "\nmode=" << mode_name(cfg.solver.mode) << "\nlambda=" << cfg.lambda
        << "\npsi=" << cfg.psi << '\n';
    return out.str();
}

}  // namespace polyhho
