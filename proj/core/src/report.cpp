#include "billiards/report.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace billiards {

namespace {

nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

nlohmann::ordered_json to_json_value(const Report& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["ok"] = r.ok();
    for (const auto& [k, v] : r.info) j["info"][k] = v;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["value"] = number(c.value);
        cj["threshold"] = c.threshold;
        cj["mode"] = c.mode == CheckMode::Max ? "max" : "min";
        cj["expect"] = c.expect_fail ? "fail" : "pass";
        cj["passed"] = c.passed();
        cj["ok"] = c.ok();
        if (!c.note.empty()) cj["note"] = c.note;
        j["checks"].push_back(cj);
    }
    return j;
}

}  // namespace

bool CheckResult::passed() const {
    if (std::isnan(value)) return false;
    return mode == CheckMode::Max ? value < threshold : value >= threshold;
}

bool Report::ok() const {
    for (const auto& c : checks)
        if (!c.ok()) return false;
    return true;
}

std::string Report::to_json() const { return to_json_value(*this).dump(2); }

std::string reports_to_json(const std::vector<Report>& reports) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : reports) j.push_back(to_json_value(r));
    return j.dump(2);
}

}  // namespace billiards
