#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace p1 {

struct CheckLine {
    std::string id;
    bool pass = false;
    bool info = false;   // informational, carries no verdict
    std::string text;
};

struct AcceptanceReport {
    std::vector<CheckLine> lines;
    bool all_pass() const;
};

std::string format_line(const CheckLine& c);
nlohmann::json to_json(const AcceptanceReport& r);

// Runs every acceptance criterion; each line is handed to `sink` as soon as it is known.
AcceptanceReport run_acceptance(const std::function<void(const CheckLine&)>& sink = {});

} // namespace p1
