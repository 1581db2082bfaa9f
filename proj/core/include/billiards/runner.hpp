#pragma once

#include <optional>
#include <string>
#include <vector>

#include "billiards/correspondence.hpp"
#include "billiards/scenario.hpp"

namespace billiards {

struct RunResult {
    Scenario scenario;
    Report report;
    std::optional<PlaneRecord> plane;
    std::optional<CurvedRecord> curved;
    std::optional<PointSetComparison> twin;
    std::vector<OrbitCorrespondence> orbits;
    std::vector<ConfocalImageReport> images;
    bool numerical_failure = false;
    bool config_error = false;
    std::string diagnostic;
};

// Runs one scenario and evaluates its checks. Errors are reported in the result, not thrown.
RunResult run_scenario(const Scenario& s);

// Independent scenarios run concurrently; results keep the input order.
std::vector<RunResult> run_batch(const std::vector<Scenario>& batch, unsigned max_threads = 0);

// Record metrics behind the billiard checks.
template <Chart C>
double native_energy_drift(const TrajectoryRecord<C>& rec);
template <Chart C>
double partner_energy_variation(const TrajectoryRecord<C>& rec);
template <Chart C>
double partner_jump_first_reflection(const TrajectoryRecord<C>& rec);
template <Chart C>
double reflection_kinetic_jump(const TrajectoryRecord<C>& rec);
template <Chart C>
double reflection_tangential_defect(const TrajectoryRecord<C>& rec);

}  // namespace billiards
