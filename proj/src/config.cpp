#include "p1/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "p1/errors.hpp"

namespace p1 {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v)
{
    T out{};
    const char* end = v.data() + v.size();
    const auto r = std::from_chars(v.data(), end, out);
    if (r.ec != std::errc() || r.ptr != end)
        fail(ErrorKind::ConfigError, "bad value for " + key + ": '" + v + "'");
    return out;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

void RunConfig::validate() const
{
    if (precision != "double")
        fail(ErrorKind::ConfigError, "unsupported precision backend '" + precision + "'");
    for (auto [name, v] : {std::pair{"ode_tol", ode_tol}, {"quad_tol", quad_tol}, {"fit_tol", fit_tol},
                           {"R", R}, {"delta", delta}, {"eps", eps}})
        if (!(v > 0))
            fail(ErrorKind::ConfigError, std::string(name) + " must be positive");
    if (N_series < 8 || N_borel < 8)
        fail(ErrorKind::ConfigError, "series orders must be at least 8");
    if (K_levels < 1)
        fail(ErrorKind::ConfigError, "K_levels must be at least 1");
}

std::string RunConfig::canonical() const
{
    std::map<std::string, std::string> kv{
        {"precision", precision},     {"ode_tol", fmt(ode_tol)},
        {"quad_tol", fmt(quad_tol)},  {"fit_tol", fmt(fit_tol)},
        {"N_series", std::to_string(N_series)}, {"N_borel", std::to_string(N_borel)},
        {"K_levels", std::to_string(K_levels)}, {"R", fmt(R)},
        {"delta", fmt(delta)},        {"eps", fmt(eps)},
        {"seed", std::to_string(seed)}};
    std::string s;
    for (const auto& [k, v] : kv)
        s += k + "=" + v + "\n";
    return s;
}

std::string RunConfig::hash() const
{
    std::ostringstream os;
    os << std::hex << std::hash<std::string>{}(canonical());
    return os.str();
}

RunConfig parse_config(const std::string& text)
{
    RunConfig c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos)
            line.resize(h);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            fail(ErrorKind::ConfigError, "repeated key " + key);
        if (key == "precision") c.precision = v;
        else if (key == "ode_tol") c.ode_tol = parse_number<double>(key, v);
        else if (key == "quad_tol") c.quad_tol = parse_number<double>(key, v);
        else if (key == "fit_tol") c.fit_tol = parse_number<double>(key, v);
        else if (key == "N_series") c.N_series = parse_number<int>(key, v);
        else if (key == "N_borel") c.N_borel = parse_number<int>(key, v);
        else if (key == "K_levels") c.K_levels = parse_number<int>(key, v);
        else if (key == "R") c.R = parse_number<double>(key, v);
        else if (key == "delta") c.delta = parse_number<double>(key, v);
        else if (key == "eps") c.eps = parse_number<double>(key, v);
        else if (key == "out_dir") c.out_dir = v;
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
        else fail(ErrorKind::ConfigError, "unknown key " + key);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        fail(ErrorKind::ConfigError, "cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

nlohmann::json to_json(const RunConfig& c)
{
    return {{"precision", c.precision}, {"ode_tol", c.ode_tol},   {"quad_tol", c.quad_tol},
            {"fit_tol", c.fit_tol},     {"N_series", c.N_series}, {"N_borel", c.N_borel},
            {"K_levels", c.K_levels},   {"R", c.R},               {"delta", c.delta},
            {"eps", c.eps},             {"out_dir", c.out_dir},   {"seed", c.seed}};
}

nlohmann::json module_versions()
{
    nlohmann::json j;
    for (const char* m : {"series_core", "borel_engine", "ode_engine", "connection", "pole_sector",
                          "cycle_dynamics", "cli"})
        j[m] = kVersion;
    return j;
}

} // namespace p1
