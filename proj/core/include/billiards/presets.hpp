#pragma once

#include <optional>
#include <string>
#include <vector>

#include "billiards/scenario.hpp"

namespace billiards {

std::vector<std::string> preset_list();
const std::vector<Scenario>& presets();
std::optional<Scenario> find_preset(const std::string& name);

}  // namespace billiards
