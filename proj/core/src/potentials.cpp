#include "billiards/potentials.hpp"

#include <cmath>
#include <string>

#include "billiards/errors.hpp"

namespace billiards {

namespace {

[[noreturn]] void near_center(int i) {
    throw SingularityError("state within guard radius of Kepler center Z" + std::to_string(i + 1), i);
}

void require_curved(const SpaceSpec& space) {
    if (!space.curved()) throw DomainError("curved-space operation called with a planar space");
}

void require_plane(const SpaceSpec& space) {
    if (space.curved()) throw DomainError("planar operation called with a curved space");
}

}  // namespace

double projected_mass(double mhat, double a, int sign) {
    const double k = 1.0 + sign * a * a;
    if (!(k > 0.0)) throw DomainError("projected mass undefined: 1 + sign a^2 <= 0");
    return mhat / std::sqrt(k);
}

LagrangeParams partner_params(const LagrangeParams& params, const SpaceSpec& space) {
    const double root = std::sqrt(space.norm_factor());
    if (space.curved()) return {params.m1 / root, params.m2 / root, params.f};
    return {params.m1 * root, params.m2 * root, params.f};
}

std::array<Eigen::Vector2d, 2> chart_centers(const SpaceSpec& space) {
    return {Eigen::Vector2d(0.0, space.a), Eigen::Vector2d(0.0, -space.a)};
}

std::array<Eigen::Vector3d, 2> ambient_centers(const SpaceSpec& space) {
    const double r = std::sqrt(space.norm_factor());
    return {Eigen::Vector3d(0.0, space.a, -1.0) / r, Eigen::Vector3d(0.0, -space.a, -1.0) / r};
}

Eigen::Vector2d force_plane(const Eigen::Vector2d& p, const LagrangeParams& params, const SpaceSpec& space) {
    require_plane(space);
    const auto centers = chart_centers(space);
    const double masses[2] = {params.m1, params.m2};
    Eigen::Vector2d F = 2.0 * params.f * p;
    for (int i = 0; i < 2; ++i) {
        if (masses[i] == 0.0) continue;
        const Eigen::Vector2d d = p - centers[i];
        const double n = affine_norm(d, space);
        if (n < kCenterGuard) near_center(i);
        F -= masses[i] / (n * n * n) * d;
    }
    return F;
}

AmbientVector force_curved(const AmbientPoint& q, const LagrangeParams& params, const SpaceSpec& space) {
    require_curved(space);
    check_ambient(q, space);
    const Eigen::Vector3d& x = q.coords;
    const auto centers = ambient_centers(space);
    const double masses[2] = {params.m1, params.m2};
    const Eigen::Vector3d pole(0.0, 0.0, -1.0);
    Eigen::Vector3d F = Eigen::Vector3d::Zero();
    if (space.kind == SpaceKind::SphereSouth) {
        for (int i = 0; i < 2; ++i) {
            if (masses[i] == 0.0) continue;
            const double c = x.dot(centers[i]);
            const double s2 = 1.0 - c * c;
            if (s2 < kCenterGuard * kCenterGuard) near_center(i);
            F += masses[i] / (s2 * std::sqrt(s2)) * centers[i];
        }
        if (params.f != 0.0) {
            const double c = -x.z();
            if (c < kCenterGuard) throw SingularityError("state on the Hooke singular set (equator)", 2);
            F += -2.0 * params.f / (c * c * c) * pole;
        }
    } else {
        for (int i = 0; i < 2; ++i) {
            if (masses[i] == 0.0) continue;
            const double c = -minkowski_dot(x, centers[i]);
            const double s2 = c * c - 1.0;
            if (s2 < kCenterGuard * kCenterGuard) near_center(i);
            F += masses[i] / (s2 * std::sqrt(s2)) * centers[i];
        }
        if (params.f != 0.0) {
            const double c = -x.z();
            F += -2.0 * params.f / (c * c * c) * pole;
        }
    }
    return tangent_project(q, F, space);
}

double force_function_curved(const AmbientPoint& q, const LagrangeParams& params, const SpaceSpec& space) {
    require_curved(space);
    check_ambient(q, space);
    const Eigen::Vector3d& x = q.coords;
    const auto centers = ambient_centers(space);
    const double masses[2] = {params.m1, params.m2};
    const bool sphere = space.kind == SpaceKind::SphereSouth;
    double U = 0.0;
    for (int i = 0; i < 2; ++i) {
        if (masses[i] == 0.0) continue;
        const double c = sphere ? x.dot(centers[i]) : -minkowski_dot(x, centers[i]);
        const double s2 = sphere ? 1.0 - c * c : c * c - 1.0;
        if (s2 < kCenterGuard * kCenterGuard) near_center(i);
        U += masses[i] * c / std::sqrt(s2);
    }
    if (params.f != 0.0) {
        const double inv_z2 = 1.0 / (x.z() * x.z());
        U += params.f * (sphere ? inv_z2 - 1.0 : 1.0 - inv_z2);
    }
    return U;
}

double energy_plane(const Eigen::Vector2d& p, const Eigen::Vector2d& v, const LagrangeParams& params,
                    const SpaceSpec& space) {
    require_plane(space);
    const auto centers = chart_centers(space);
    const double masses[2] = {params.m1, params.m2};
    double E = 0.5 * affine_dot(v, v, space) - params.f * affine_dot(p, p, space);
    for (int i = 0; i < 2; ++i) {
        if (masses[i] == 0.0) continue;
        const double n = affine_norm(p - centers[i], space);
        if (n < kCenterGuard) near_center(i);
        E -= masses[i] / n;
    }
    return E;
}

double energy_curved(const AmbientPoint& q, const AmbientVector& v, const LagrangeParams& params,
                     const SpaceSpec& space) {
    return 0.5 * ambient_dot(v.comps, v.comps, space) - force_function_curved(q, params, space);
}

double energy_curved_in_chart(const Eigen::Vector2d& p, const Eigen::Vector2d& v, const LagrangeParams& params,
                              const SpaceSpec& space) {
    require_curved(space);
    const double s = space.sign();
    const double a = space.a;
    const double k = space.norm_factor();
    const double x = p.x(), y = p.y(), vx = v.x(), vy = v.y();
    if (s < 0 && !(x * x + y * y < 1.0)) throw DomainError("chart point outside the Klein disc");
    const double L = vx * y - x * vy;
    double E = 0.5 * (vx * vx + vy * vy + s * L * L) - params.f * (x * x + y * y);
    if (params.m1 != 0.0) {
        const double d = std::sqrt((y - a) * (y - a) + k * x * x);
        if (d < kCenterGuard) near_center(0);
        E -= params.m1 * (1.0 + s * a * y) / d;
    }
    if (params.m2 != 0.0) {
        const double d = std::sqrt((y + a) * (y + a) + k * x * x);
        if (d < kCenterGuard) near_center(1);
        E -= params.m2 * (1.0 - s * a * y) / d;
    }
    return E;
}

EnergyPair energy_pair(const GnomonicPoint& p, const GnomonicVector& v, const LagrangeParams& params,
                       const SpaceSpec& space) {
    require_plane(space);
    return {energy_plane(p.coords, v.comps, params, space),
            energy_curved_in_chart(p.coords, v.comps, partner_params(params, space), space.partner())};
}

EnergyPair energy_pair(const AmbientPoint& q, const AmbientVector& v, const LagrangeParams& params,
                       const SpaceSpec& space) {
    require_curved(space);
    const GnomonicPoint p = central_project_down(q, space);
    const Eigen::Vector2d u = pushforward_velocity(q, v, space).comps / reparametrize_rate(p, space);
    return {energy_curved(q, v, params, space),
            energy_plane(p.coords, u, partner_params(params, space), space.partner())};
}

double extended_integral_on_sphere(const AmbientPoint& q, const AmbientVector& v, const LagrangeParams& params,
                                   const SpaceSpec& space) {
    if (space.kind != SpaceKind::SphereSouth) throw DomainError("extended integral is defined on the sphere only");
    const double a = space.a;
    const double k = space.norm_factor();
    const double x = q.coords.x(), y = q.coords.y(), z = q.coords.z();
    const double xp = v.comps.x(), yp = v.comps.y(), zp = v.comps.z();
    if (std::abs(z) < kCenterGuard) throw SingularityError("extended integral evaluated on the equator", 2);
    const LagrangeParams m = partner_params(params, space);
    double E = ((k * xp * xp + yp * yp) * z * z - 2.0 * zp * (k * x * xp + y * yp) * z +
                zp * zp * (k * x * x + y * y)) /
               (2.0 * k);
    if (m.m1 != 0.0) {
        const double d = std::sqrt((k * x * x + (y + a * z) * (y + a * z)) / k);
        if (d < kCenterGuard) near_center(0);
        E += m.m1 * z / d;
    }
    if (m.m2 != 0.0) {
        const double d = std::sqrt((k * x * x + (y - a * z) * (y - a * z)) / k);
        if (d < kCenterGuard) near_center(1);
        E += m.m2 * z / d;
    }
    E -= m.f * (k * x * x + y * y) / (k * z * z);
    return E;
}

}  // namespace billiards
