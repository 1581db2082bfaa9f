#pragma once

#include <string>

#include "billiards/dynamics.hpp"

namespace billiards {

// Maps a whole record to the partner geometry (curved -> plane is Down, plane -> curved is Up).
// Partner time is recomputed by trapezoidal integration of the rate along the samples; the
// energy pair is swapped so e_native refers to the image system.
PlaneRecord project_trajectory(const CurvedRecord& rec, Direction direction = Direction::Down);
CurvedRecord project_trajectory(const PlaneRecord& rec, Direction direction = Direction::Up);

struct PointSetComparison {
    double max_distance = 0.0;
    bool structural_mismatch = false;
    std::string detail;
    int segments = 0;
};

// Time-free comparison: per bounce segment, both curves are reparametrized by arc length and
// compared pointwise. Records must come from the same chart.
PointSetComparison compare_point_sets(const PlaneRecord& A, const PlaneRecord& B);
PointSetComparison compare_point_sets(const CurvedRecord& A, const CurvedRecord& B);

// |det| of the velocity Jacobian of (e_native, e_partner) in the gnomonic chart.
double independence_check(const PlaneState& s, const LagrangeParams& params, const SpaceSpec& space);
double independence_check(const CurvedState& s, const LagrangeParams& params, const SpaceSpec& space);

// Initial data of the partner system at the same point: pushforward plus time-change scaling.
PlaneState partner_state(const CurvedState& s, const SpaceSpec& space);
CurvedState partner_state(const PlaneState& s, const SpaceSpec& space);

// Acceleration, in the planar time, of the central projection of the curved motion through s.
// Evaluated by the chain rule from the ambient equations of motion.
Eigen::Vector2d projected_acceleration(const CurvedState& s, const LagrangeParams& params, const SpaceSpec& space);

struct TwinResult {
    CurvedRecord curved;
    PlaneRecord plane;
    PointSetComparison comparison;
};

// Simulates the curved billiard and its planar partner from matched initial data and compares
// the projected curved orbit with the planar one.
TwinResult twin_simulation(const CurvedState& init, const LagrangeParams& params, const SpaceSpec& space,
                           const WallSet& wall, const SimulationLimits& limits,
                           const IntegratorOptions& opt = IntegratorOptions::defaults());

}  // namespace billiards
