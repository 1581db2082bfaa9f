#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "billiards/spaces.hpp"

namespace billiards {

enum class ConicFamily { Ellipse, Hyperbola };
enum class Branch { Both, Positive, Negative };

// Polar-angle window [lo, hi] (radians, chart atan2(y, x)); lo may exceed hi to wrap through pi.
struct ArcRange {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double angle) const;
};

// Conic cut out by the cone x^2/A2 + y^2/B2 - z^2 = 0. In the gnomonic chart it reads
// x^2/A2 + y^2/B2 = 1, with A2 = tan^2(alpha) (tanh^2 on the hyperboloid) and A2 < 0 for
// hyperbolas with foci on the y axis. A nonzero center is only allowed on a plane and
// describes non-confocal control walls.
struct ConicSpec {
    SpaceSpec space;
    double A2 = 1.0;
    double B2 = 1.0;
    Branch branch = Branch::Both;
    std::optional<ArcRange> arc;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();

    // Member of the confocal family with foci over (0, +-a): y-semi-axis B, ellipse if B > |a|.
    static ConicSpec from_B(const SpaceSpec& space, double B, Branch branch = Branch::Both);
    static ConicSpec from_angles(const SpaceSpec& space, double alpha, double beta);
    static ConicSpec offset_circle(const SpaceSpec& plane, const Eigen::Vector2d& center, double radius);

    ConicFamily family() const { return A2 > 0.0 ? ConicFamily::Ellipse : ConicFamily::Hyperbola; }
    bool centered() const { return center.isZero(0.0); }
    // |B2 - (1 + s a^2) A2 - a^2|: zero when the foci sit over the Kepler centers.
    double focal_defect() const;
    bool confocal(double tol = 1e-10) const { return centered() && focal_defect() < tol; }
};

struct WallSet {
    std::vector<ConicSpec> members;
    // Throws DomainError on empty sets or members living in different spaces.
    void validate() const;
    const SpaceSpec& space() const { return members.front().space; }
    bool confocal(double tol = 1e-10) const;
};

double implicit_eval(const ConicSpec& spec, const Eigen::Vector2d& p);
double implicit_eval(const ConicSpec& spec, const Eigen::Vector3d& q);
// Euclidean gradient of the implicit function in the natural coordinates.
Eigen::Vector2d implicit_gradient(const ConicSpec& spec, const Eigen::Vector2d& p);
Eigen::Vector3d implicit_gradient(const ConicSpec& spec, const Eigen::Vector3d& q);

// Unit normal and unit tangent in the space metric at an on-curve point.
Eigen::Vector2d normal_at(const ConicSpec& spec, const Eigen::Vector2d& p);
Eigen::Vector3d normal_at(const ConicSpec& spec, const Eigen::Vector3d& q);
Eigen::Vector2d tangent_at(const ConicSpec& spec, const Eigen::Vector2d& p);
Eigen::Vector3d tangent_at(const ConicSpec& spec, const Eigen::Vector3d& q);

bool member_active(const ConicSpec& spec, const Eigen::Vector2d& chart_point);

enum class Direction { Up, Down };
ConicSpec project_conic(const ConicSpec& spec, Direction direction);

// Implicit value of the active member nearest to zero, and its index (-1 if none is active).
std::pair<double, int> crossing_function(const WallSet& wall, const Eigen::Vector2d& p);
std::pair<double, int> crossing_function(const WallSet& wall, const Eigen::Vector3d& q);

// n points along the conic in gnomonic chart coordinates (active branch/arc only).
std::vector<Eigen::Vector2d> sample_conic_chart(const ConicSpec& spec, int n);

}  // namespace billiards
