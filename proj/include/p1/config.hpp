#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace p1 {

struct RunConfig {
    std::string precision = "double";
    double ode_tol = 1e-12;
    double quad_tol = 1e-14;
    double fit_tol = 1e-3;
    int N_series = 200;
    int N_borel = 200;
    int K_levels = 6;
    double R = 20.0;
    double delta = 0.05;
    double eps = 0.05;
    std::string out_dir;   // empty: write to stdout
    std::uint64_t seed = 0;

    void validate() const;
    // Sorted key=value lines of everything except out_dir; the hash is taken over this text.
    std::string canonical() const;
    std::string hash() const;
};

// Flat "key = value" text, '#' starts a comment. Unknown keys and repeated keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& c);

inline constexpr const char* kVersion = "0.1.0";
nlohmann::json module_versions();

} // namespace p1
