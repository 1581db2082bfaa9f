#pragma once

#include <filesystem>
#include <string>

#include "billiards/runner.hpp"

namespace billiards {

// Shortest decimal with 17 significant digits; parses back to the same double.
std::string format_double(double v);

std::string trajectory_csv(const PlaneRecord& rec);
std::string trajectory_csv(const CurvedRecord& rec);
std::string events_csv(const PlaneRecord& rec);
std::string events_csv(const CurvedRecord& rec);
std::string integrals_csv(const PlaneRecord& rec);
std::string integrals_csv(const CurvedRecord& rec);

// Writes <stem>.trajectory.csv, <stem>.events.csv and <stem>.integrals.csv. Throws
// std::runtime_error naming the path on I/O failure.
void export_plotdata(const PlaneRecord& rec, const std::filesystem::path& stem);
void export_plotdata(const CurvedRecord& rec, const std::filesystem::path& stem);

// Plot data of the run (if any) plus <name>.report.json in dir.
void write_run_outputs(const RunResult& r, const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace billiards
