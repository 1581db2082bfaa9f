#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "billiards/conformal.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/report.hpp"

namespace billiards {

// Malformed or inconsistent scenario configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Billiard, ConformalOrbit, ConformalImage };

const char* to_string(ScenarioKind kind);

struct CheckInfo {
    const char* name;
    ScenarioKind kind;
    CheckMode mode;
    double threshold;
    const char* description;
};

const std::vector<CheckInfo>& known_checks();
// Throws ConfigError for unknown names.
const CheckInfo& check_info(const std::string& name);

struct CheckSpec {
    std::string name;
    double threshold = 0.0;
    bool expect_fail = false;
    bool operator==(const CheckSpec&) const = default;
};

// Initial state. For curved spaces a gnomonic init is lifted: pos is the chart point and vel
// the chart velocity in the planar time.
struct InitSpec {
    Chart chart = Chart::Gnomonic;
    std::vector<double> pos;
    std::vector<double> vel;
    double t = 0.0;
    bool operator==(const InitSpec&) const = default;
};

struct OrbitCase {
    Pairing pairing = Pairing::SphericalHookeKepler;
    double f = 0.0;
    cplx z0{0.0, 0.0};
    cplx w0{0.0, 0.0};
    // <= 0: one revolution of the source orbit.
    double t_span = 0.0;
    bool operator==(const OrbitCase&) const = default;
};

struct ImageGrid {
    std::vector<double> a_values;
    // Ellipse members are generated as a + offset.
    std::vector<double> ellipse_offsets;
    // Absolute ellipse members, used for every a below them.
    std::vector<double> ellipse_values;
    // Hyperbola members are generated as a * fraction.
    std::vector<double> hyperbola_fractions;
    int samples = 200;
    bool operator==(const ImageGrid&) const = default;
};

struct Scenario {
    std::string name;
    std::string description;
    ScenarioKind kind = ScenarioKind::Billiard;
    SpaceSpec space;
    LagrangeParams params;
    WallSet wall;
    InitSpec init;
    SimulationLimits limits;
    std::optional<double> tolerance;
    std::vector<CheckSpec> checks;
    std::uint64_t seed = 0;
    std::vector<OrbitCase> orbits;
    ImageGrid image;

    IntegratorOptions integrator_options() const;
};

bool operator==(const ConicSpec& a, const ConicSpec& b);
bool operator==(const Scenario& a, const Scenario& b);

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);

// A file holds either one scenario or {"scenarios": [...]}; entries may be preset names.
std::vector<Scenario> scenarios_from_json(const std::string& text);
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);

PlaneState plane_init(const Scenario& s);
CurvedState curved_init(const Scenario& s);

}  // namespace billiards
