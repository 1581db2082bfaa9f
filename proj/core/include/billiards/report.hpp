#pragma once

#include <string>
#include <utility>
#include <vector>

namespace billiards {

// Max: passes when value < threshold. Min: passes when value >= threshold.
enum class CheckMode { Max, Min };

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    CheckMode mode = CheckMode::Max;
    bool expect_fail = false;
    std::string note;

    bool passed() const;
    // Outcome matches the declared expectation.
    bool ok() const { return passed() != expect_fail; }
};

struct Report {
    std::string name;
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, std::string>> info;

    bool ok() const;
    void add(CheckResult c) { checks.push_back(std::move(c)); }
    void note(std::string key, std::string value) { info.emplace_back(std::move(key), std::move(value)); }
    std::string to_json() const;
};

std::string reports_to_json(const std::vector<Report>& reports);

}  // namespace billiards
