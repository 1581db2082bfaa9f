#include "billiards/presets.hpp"

#include <cmath>

namespace billiards {

namespace {

enum class Geometry { Plane, Sphere, Hyperbolic };

struct Setup {
    SpaceSpec space;
    double B = 0.0;
    std::string suffix;
};

Setup setup(Geometry g) {
    switch (g) {
        case Geometry::Plane: return {SpaceSpec::plane(0.5, +1), 1.2, "plane"};
        case Geometry::Sphere: return {SpaceSpec::sphere(0.5), 1.2, "sphere"};
        case Geometry::Hyperbolic: return {SpaceSpec::hyperboloid(0.4), 0.8, "hyperbolic"};
    }
    return {};
}

std::vector<CheckSpec> billiard_checks() {
    return {{"native_energy_drift", 1e-9, false},    {"partner_energy_variation", 1e-7, false},
            {"reflection_kinetic_energy", 1e-12, false}, {"reflection_tangential", 1e-10, false},
            {"twin_correspondence", 1e-6, false},    {"bounce_count", 20.0, false}};
}

// Starts just off the pole, heading between the Kepler centers so the orbit keeps clear of them.
Scenario billiard(const std::string& name, const std::string& description, Geometry g, LagrangeParams params,
                  double angle = 0.3, double speed = 2.0) {
    const Setup su = setup(g);
    Scenario s;
    s.name = name;
    s.description = description;
    s.kind = ScenarioKind::Billiard;
    s.space = su.space;
    s.params = params;
    s.wall.members = {ConicSpec::from_B(su.space, su.B)};
    s.init.chart = Chart::Gnomonic;
    s.init.pos = {0.05, 0.0};
    s.init.vel = {speed * std::cos(angle), speed * std::sin(angle)};
    s.limits = {200.0, 20, 0.01};
    s.checks = billiard_checks();
    return s;
}

std::string geometry_name(const std::string& stem, Geometry g, bool bare_plane) {
    if (g == Geometry::Plane && bare_plane) return stem;
    return stem + "-" + setup(g).suffix;
}

const char* geometry_word(Geometry g) {
    switch (g) {
        case Geometry::Plane: return "in the plane";
        case Geometry::Sphere: return "on the sphere";
        case Geometry::Hyperbolic: return "in the hyperbolic plane";
    }
    return "";
}

std::vector<Scenario> build() {
    std::vector<Scenario> out;
    const Geometry all[] = {Geometry::Plane, Geometry::Sphere, Geometry::Hyperbolic};

    struct Family {
        const char* stem;
        bool bare_plane;
        const char* what;
        LagrangeParams params;
    };
    const Family families[] = {
        {"birkhoff-ellipse", true, "Free billiard in a confocal ellipse", {0.0, 0.0, 0.0}},
        {"hooke-confocal", false, "Hooke billiard in a confocal ellipse", {0.0, 0.0, -0.3}},
        {"kepler-focused-ellipse", false, "Kepler billiard with the center at a focus", {0.3, 0.0, 0.0}},
        {"two-center-confocal", true, "Two-center billiard with the centers at the foci", {0.25, -0.15, 0.0}},
        {"hooke-kepler-confocal", false, "Kepler center at a focus plus a Hooke term", {0.25, 0.0, -0.2}},
        {"lagrange-full", false, "Full Lagrange billiard in a confocal ellipse", {0.2, 0.15, -0.1}},
    };
    for (const auto& fam : families)
        for (Geometry g : all)
            out.push_back(billiard(geometry_name(fam.stem, g, fam.bare_plane),
                                   std::string(fam.what) + " " + geometry_word(g), g, fam.params));

    for (Geometry g : {Geometry::Sphere, Geometry::Hyperbolic}) {
        Scenario combo = billiard(geometry_name("lagrange-combination", g, false),
                                  std::string("Lagrange billiard bounded by an ellipse and one hyperbola branch "
                                              "of the same confocal family ") + geometry_word(g),
                                  g, {0.2, 0.15, -0.1});
        combo.wall.members.push_back(ConicSpec::from_B(combo.space, 0.1, Branch::Positive));
        out.push_back(combo);
    }

    Scenario control = billiard("negative-control-offset-circle",
                                "Lagrange billiard in a circle that is not confocal; the partner energy jumps",
                                Geometry::Plane, {0.2, 0.15, -0.1});
    control.wall.members = {ConicSpec::offset_circle(control.space, {0.2, 0.0}, 1.2)};
    // Chaotic orbit with close center passes.
    control.tolerance = 1e-12;
    control.checks = {{"native_energy_drift", 1e-9, false},
                      {"partner_energy_variation", 1e-7, true},
                      {"partner_jump_first_reflection", 1e-3, false},
                      {"reflection_kinetic_energy", 1e-12, false},
                      {"reflection_tangential", 1e-10, false},
                      {"bounce_count", 20.0, false}};
    out.push_back(control);

    Scenario orbits;
    orbits.name = "conformal-orbit-correspondence";
    orbits.description = "Hooke orbits under the square map against their partner orbits";
    orbits.kind = ScenarioKind::ConformalOrbit;
    const cplx z0(0.4, 0.1), w0(0.2, 0.9);
    orbits.orbits = {{Pairing::SphericalHookeKepler, 0.3, z0, w0, 0.0},
                     {Pairing::HyperbolicHookeKepler, 0.3, z0, w0, 0.0},
                     {Pairing::SphericalHyperbolicHooke, 0.3, z0, w0, 0.0}};
    orbits.checks = {{"orbit_deviation", 1e-6, false}, {"level_defect", 1e-12, false}, {"shell_drift", 1e-9, false}};
    out.push_back(orbits);

    Scenario image;
    image.name = "conformal-confocal-image";
    image.description = "Square-map images of focused hyperbolic conics form a centered confocal family";
    image.kind = ScenarioKind::ConformalImage;
    image.image.a_values = {0.1, 0.3, 0.5};
    image.image.ellipse_offsets = {0.1, 0.3};
    image.image.ellipse_values = {0.9};
    image.image.hyperbola_fractions = {0.25, 0.5};
    image.image.samples = 200;
    image.checks = {{"sphere_residual", 1e-8, false},
                    {"factor_residual", 1e-8, false},
                    {"foci_error", 1e-8, false},
                    {"family_spread", 1e-8, false},
                    {"g1_nonempty_ellipses", 0.5, false}};
    out.push_back(image);
    return out;
}

}  // namespace

const std::vector<Scenario>& presets() {
    static const std::vector<Scenario> all = build();
    return all;
}

std::vector<std::string> preset_list() {
    std::vector<std::string> names;
    for (const auto& s : presets()) names.push_back(s.name);
    return names;
}

std::optional<Scenario> find_preset(const std::string& name) {
    for (const auto& s : presets())
        if (s.name == name) return s;
    return std::nullopt;
}

}  // namespace billiards
