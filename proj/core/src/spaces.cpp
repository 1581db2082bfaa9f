#include "billiards/spaces.hpp"

#include <cmath>
#include <string>

#include "billiards/errors.hpp"

namespace billiards {

namespace {

constexpr double kEdge = 1e-12;

}  // namespace

SpaceSpec SpaceSpec::plane(double a, int partner_sign) {
    if (partner_sign != 1 && partner_sign != -1) throw DomainError("plane partner sign must be +1 or -1");
    SpaceSpec s{SpaceKind::PlaneAffine, a, partner_sign};
    s.norm_factor();
    return s;
}

SpaceSpec SpaceSpec::sphere(double a) { return SpaceSpec{SpaceKind::SphereSouth, a, +1}; }

SpaceSpec SpaceSpec::hyperboloid(double a) {
    if (!(std::abs(a) < 1.0)) throw DomainError("hyperboloid requires |a| < 1, got a = " + std::to_string(a));
    return SpaceSpec{SpaceKind::HyperboloidLower, a, -1};
}

int SpaceSpec::sign() const {
    switch (kind) {
        case SpaceKind::SphereSouth: return 1;
        case SpaceKind::HyperboloidLower: return -1;
        default: return 0;
    }
}

int SpaceSpec::formula_sign() const { return curved() ? sign() : partner_sign; }

double SpaceSpec::norm_factor() const {
    double k = 1.0 + formula_sign() * a * a;
    if (!(k > 0.0)) throw DomainError("affine norm undefined: 1 + s a^2 <= 0");
    return k;
}

SpaceSpec SpaceSpec::partner() const {
    if (curved()) return plane(a, sign());
    return partner_sign > 0 ? sphere(a) : hyperboloid(a);
}

const char* to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::PlaneAffine: return "plane";
        case SpaceKind::SphereSouth: return "sphere";
        case SpaceKind::HyperboloidLower: return "hyperboloid";
    }
    return "?";
}

double minkowski_dot(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    return u.x() * v.x() + u.y() * v.y() - u.z() * v.z();
}

double ambient_dot(const Eigen::Vector3d& u, const Eigen::Vector3d& v, const SpaceSpec& space) {
    return space.kind == SpaceKind::HyperboloidLower ? minkowski_dot(u, v) : u.dot(v);
}

double affine_dot(const Eigen::Vector2d& u, const Eigen::Vector2d& v, const SpaceSpec& space) {
    return u.x() * v.x() + u.y() * v.y() / space.norm_factor();
}

double affine_norm(const Eigen::Vector2d& p, const SpaceSpec& space) { return std::sqrt(affine_dot(p, p, space)); }

void check_ambient(const AmbientPoint& q, const SpaceSpec& space) {
    if (!space.curved()) throw DomainError("ambient point given for a planar space");
    if (!(q.coords.z() < -kEdge)) throw DomainError("point on or above the equator (z >= 0)");
}

GnomonicPoint central_project_down(const AmbientPoint& q, const SpaceSpec& space) {
    check_ambient(q, space);
    const double z = q.coords.z();
    return GnomonicPoint{Eigen::Vector2d(-q.coords.x() / z, -q.coords.y() / z)};
}

AmbientPoint central_lift_up(const GnomonicPoint& p, const SpaceSpec& space) {
    const double r2 = reparametrize_rate(p, space);
    const double r = std::sqrt(r2);
    return AmbientPoint{Eigen::Vector3d(p.coords.x() / r, p.coords.y() / r, -1.0 / r)};
}

GnomonicVector pushforward_velocity(const AmbientPoint& base, const AmbientVector& v, const SpaceSpec& space) {
    check_ambient(base, space);
    const Eigen::Vector3d& q = base.coords;
    const double z = q.z();
    const double z2 = z * z;
    return GnomonicVector{Eigen::Vector2d(-v.comps.x() / z + q.x() * v.comps.z() / z2,
                                          -v.comps.y() / z + q.y() * v.comps.z() / z2)};
}

AmbientVector pushforward_velocity(const GnomonicPoint& base, const GnomonicVector& v, const SpaceSpec& space) {
    const double s = space.formula_sign();
    const double r2 = reparametrize_rate(base, space);
    const double r = std::sqrt(r2);
    const Eigen::Vector3d qt(base.coords.x(), base.coords.y(), -1.0);
    const Eigen::Vector3d u(v.comps.x(), v.comps.y(), 0.0);
    return AmbientVector{u / r - s * base.coords.dot(v.comps) * qt / (r2 * r)};
}

double reparametrize_rate(const GnomonicPoint& p, const SpaceSpec& space) {
    const double rate = 1.0 + space.formula_sign() * p.coords.squaredNorm();
    if (!(rate > kEdge)) throw DomainError("point outside the Klein disc");
    return rate;
}

AmbientVector tangent_project(const AmbientPoint& q, const Eigen::Vector3d& v, const SpaceSpec& space) {
    if (space.kind == SpaceKind::HyperboloidLower) return AmbientVector{v + minkowski_dot(v, q.coords) * q.coords};
    return AmbientVector{v - v.dot(q.coords) * q.coords};
}

AmbientPoint project_to_manifold(const Eigen::Vector3d& x, const SpaceSpec& space) {
    if (space.kind == SpaceKind::HyperboloidLower) {
        const double m = -minkowski_dot(x, x);
        if (!(m > 0.0) || !(x.z() < 0.0)) throw DomainError("point cannot be scaled onto the lower sheet");
        return AmbientPoint{x / std::sqrt(m)};
    }
    const double n = x.norm();
    if (!(n > 0.0)) throw DomainError("cannot project the origin onto the sphere");
    return AmbientPoint{x / n};
}

double manifold_residual(const Eigen::Vector3d& x, const SpaceSpec& space) {
    if (space.kind == SpaceKind::HyperboloidLower) return minkowski_dot(x, x) + 1.0;
    return x.squaredNorm() - 1.0;
}

StereoPoint stereographic_chart(const AmbientPoint& q, const SpaceSpec& space) {
    const Eigen::Vector3d& x = q.coords;
    if (space.kind == SpaceKind::HyperboloidLower) {
        if (!(x.z() < 0.0)) throw DomainError("hyperboloid point not on the lower sheet");
    } else if (!(std::abs(1.0 - x.z()) > kEdge)) {
        throw DomainError("stereographic chart undefined at the north pole");
    }
    return StereoPoint{Eigen::Vector2d(x.x(), x.y()) / (1.0 - x.z())};
}

AmbientPoint stereographic_inverse(const StereoPoint& w, const SpaceSpec& space) {
    const double rho = w.coords.squaredNorm();
    if (space.kind == SpaceKind::HyperboloidLower) {
        const double d = 1.0 - rho;
        if (!(d > kEdge)) throw DomainError("point outside the Poincare disc");
        return AmbientPoint{Eigen::Vector3d(2.0 * w.coords.x() / d, 2.0 * w.coords.y() / d, -(1.0 + rho) / d)};
    }
    const double d = 1.0 + rho;
    return AmbientPoint{Eigen::Vector3d(2.0 * w.coords.x() / d, 2.0 * w.coords.y() / d, (rho - 1.0) / d)};
}

}  // namespace billiards
