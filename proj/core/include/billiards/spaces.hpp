#pragma once

#include <Eigen/Core>
#include <type_traits>

namespace billiards {

enum class SpaceKind { PlaneAffine, SphereSouth, HyperboloidLower };

// Which geometry, plus the half-separation a of the Kepler centers in the gnomonic chart.
// A plane also remembers which curved space it is paired with, since its affine
// norm depends on that choice.
struct SpaceSpec {
    SpaceKind kind = SpaceKind::PlaneAffine;
    double a = 0.0;
    int partner_sign = +1;

    static SpaceSpec plane(double a, int partner_sign = +1);
    static SpaceSpec sphere(double a);
    static SpaceSpec hyperboloid(double a);

    // +1 sphere, -1 hyperboloid, 0 plane.
    int sign() const;
    // Sign entering the chart formulas: the curvature sign, or the partner's for a plane.
    int formula_sign() const;
    // 1 + s a^2.
    double norm_factor() const;
    bool curved() const { return kind != SpaceKind::PlaneAffine; }
    SpaceSpec partner() const;
    bool operator==(const SpaceSpec&) const = default;
};

const char* to_string(SpaceKind kind);

enum class Chart { Ambient3, Gnomonic, Stereographic };

template <Chart C>
using ChartVec = std::conditional_t<C == Chart::Ambient3, Eigen::Vector3d, Eigen::Vector2d>;

template <Chart C>
struct ChartPoint {
    ChartVec<C> coords = ChartVec<C>::Zero();
};

template <Chart C>
struct TangentVector {
    ChartVec<C> comps = ChartVec<C>::Zero();
};

using AmbientPoint = ChartPoint<Chart::Ambient3>;
using GnomonicPoint = ChartPoint<Chart::Gnomonic>;
using StereoPoint = ChartPoint<Chart::Stereographic>;
using AmbientVector = TangentVector<Chart::Ambient3>;
using GnomonicVector = TangentVector<Chart::Gnomonic>;

// Inner products. The hyperboloid uses the Minkowski pairing x1y1 + x2y2 - x3y3,
// which is positive definite on tangent spaces of the lower sheet.
double minkowski_dot(const Eigen::Vector3d& u, const Eigen::Vector3d& v);
double ambient_dot(const Eigen::Vector3d& u, const Eigen::Vector3d& v, const SpaceSpec& space);
// <u, v>_a = u1 v1 + u2 v2 / (1 + s a^2)
double affine_dot(const Eigen::Vector2d& u, const Eigen::Vector2d& v, const SpaceSpec& space);
double affine_norm(const Eigen::Vector2d& p, const SpaceSpec& space);

GnomonicPoint central_project_down(const AmbientPoint& q, const SpaceSpec& space);
AmbientPoint central_lift_up(const GnomonicPoint& p, const SpaceSpec& space);

// Differential of the central projection (Down) or of its inverse (Up). No time change.
GnomonicVector pushforward_velocity(const AmbientPoint& base, const AmbientVector& v, const SpaceSpec& space);
AmbientVector pushforward_velocity(const GnomonicPoint& base, const GnomonicVector& v, const SpaceSpec& space);

// dt/dtau between the curved system (time tau) and its planar partner (time t):
// 1 + x^2 + y^2 on the sphere, 1 - x^2 - y^2 on the hyperboloid.
double reparametrize_rate(const GnomonicPoint& p, const SpaceSpec& space);

AmbientVector tangent_project(const AmbientPoint& q, const Eigen::Vector3d& v, const SpaceSpec& space);
// Radial rescaling back onto the sphere or the lower sheet.
AmbientPoint project_to_manifold(const Eigen::Vector3d& x, const SpaceSpec& space);
// Residual of x^2 + y^2 + z^2 - 1 (sphere) or x^2 + y^2 - z^2 + 1 (hyperboloid).
double manifold_residual(const Eigen::Vector3d& x, const SpaceSpec& space);

// Stereographic projection from the north pole (0,0,1). On the lower sheet this is the Poincare disc.
StereoPoint stereographic_chart(const AmbientPoint& q, const SpaceSpec& space);
AmbientPoint stereographic_inverse(const StereoPoint& w, const SpaceSpec& space);

// Throws DomainError if q is not a valid point of the curved space.
void check_ambient(const AmbientPoint& q, const SpaceSpec& space);

}  // namespace billiards
