#include <cmath>

#include <gtest/gtest.h>

#include "billiards/correspondence.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/errors.hpp"
#include "billiards/potentials.hpp"
#include "test_util.hpp"

using namespace billiards;
using billiards::test::random_disc;

namespace {

const SpaceSpec kSphere = SpaceSpec::sphere(0.5);
const SpaceSpec kHyper = SpaceSpec::hyperboloid(0.4);

bool clear_of_centers(const Eigen::Vector2d& p, const SpaceSpec& sp, double r = 0.05) {
    for (const auto& c : chart_centers(sp))
        if ((p - c).norm() < r) return false;
    return true;
}

Eigen::Vector2d random_point(std::mt19937_64& rng, const SpaceSpec& sp) {
    while (true) {
        const Eigen::Vector2d p = random_disc(rng, sp.formula_sign() > 0 ? 1.5 : 0.9);
        if (clear_of_centers(p, sp)) return p;
    }
}

// Spherical energy written out in the gnomonic chart, velocities in the planar time.
double sphere_chart_energy(const Eigen::Vector2d& p, const Eigen::Vector2d& v, const LagrangeParams& m, double a) {
    const double x = p.x(), y = p.y(), vx = v.x(), vy = v.y();
    const double kin = 0.5 * ((1 + y * y) * vx * vx - 2 * x * y * vx * vy + (1 + x * x) * vy * vy);
    return kin - m.m1 * (a * y + 1) / std::sqrt((y - a) * (y - a) + (1 + a * a) * x * x) -
           m.m2 * (-a * y + 1) / std::sqrt((y + a) * (y + a) + (1 + a * a) * x * x) - m.f * (x * x + y * y);
}

// Planar energy with the affine norm of a sphere partner.
double plane_energy(const Eigen::Vector2d& p, const Eigen::Vector2d& v, const LagrangeParams& m, double a) {
    const double k = 1 + a * a, x = p.x(), y = p.y();
    return 0.5 * (v.x() * v.x() + v.y() * v.y() / k) - m.f * (x * x + y * y / k) -
           m.m1 / std::sqrt(x * x + (y - a) * (y - a) / k) - m.m2 / std::sqrt(x * x + (y + a) * (y + a) / k);
}

}  // namespace

TEST(ProjectedMass, Examples) {
    EXPECT_DOUBLE_EQ(projected_mass(1.0, 0.0, +1), 1.0);
    EXPECT_NEAR(projected_mass(std::sqrt(2.0), 1.0, +1), 1.0, 1e-15);
    EXPECT_NEAR(projected_mass(0.8, 0.6, -1), 1.0, 1e-15);
    EXPECT_THROW(projected_mass(1.0, 1.0, -1), DomainError);
}

TEST(PartnerParams, MassesScaleHookeUnchanged) {
    const LagrangeParams p{0.3, -0.2, 0.7};
    const LagrangeParams q = partner_params(p, kSphere);
    EXPECT_NEAR(q.m1, 0.3 / std::sqrt(1.25), 1e-15);
    EXPECT_NEAR(q.m2, -0.2 / std::sqrt(1.25), 1e-15);
    EXPECT_EQ(q.f, 0.7);
    const LagrangeParams back = partner_params(q, kSphere.partner());
    EXPECT_NEAR(back.m1, p.m1, 1e-15);
    EXPECT_NEAR(back.m2, p.m2, 1e-15);
}

TEST(ForcePlane, HookeOnly) {
    const auto F = force_plane({1.0, 0.0}, {0.0, 0.0, 1.0}, SpaceSpec::plane(0.7));
    EXPECT_NEAR(F.x(), 2.0, 1e-15);
    EXPECT_NEAR(F.y(), 0.0, 1e-15);
}

TEST(ForcePlane, EqualMassesSymmetric) {
    const auto F = force_plane({0.37, 0.0}, {0.8, 0.8, 0.0}, SpaceSpec::plane(0.5));
    EXPECT_NEAR(F.y(), 0.0, 1e-15);
    EXPECT_LT(F.x(), 0.0);
}

TEST(ForcePlane, SingleCenterAtOrigin) {
    const auto F = force_plane({0.0, 2.0}, {1.0, 0.0, 0.0}, SpaceSpec::plane(0.0));
    EXPECT_NEAR(F.x(), 0.0, 1e-16);
    EXPECT_NEAR(F.y(), -0.25, 1e-15);
}

TEST(ForcePlane, CenterProximityNamesCenter) {
    const SpaceSpec sp = SpaceSpec::plane(0.5);
    try {
        force_plane({0.0, -0.5 + 1e-12}, {0.0, 1.0, 0.0}, sp);
        FAIL() << "expected SingularityError";
    } catch (const SingularityError& e) {
        EXPECT_EQ(e.center(), 1);
    }
}

TEST(ForcePlane, IsGradientOfEnergy) {
    std::mt19937_64 rng(11);
    const SpaceSpec sp = SpaceSpec::plane(0.5);
    const LagrangeParams m{0.4, -0.3, 0.2};
    for (int i = 0; i < 100; ++i) {
        const Eigen::Vector2d p = random_point(rng, sp);
        const Eigen::Vector2d d = test::random_normal2(rng);
        const double h = 1e-6;
        const double fd = -(energy_plane(p + h * d, {0, 0}, m, sp) - energy_plane(p - h * d, {0, 0}, m, sp)) / (2 * h);
        // Force is the affine-metric gradient, so the pairing uses the affine inner product.
        const double an = affine_dot(force_plane(p, m, sp), d, sp);
        EXPECT_LT(std::abs(fd - an), 1e-5 * std::max(1.0, std::abs(an)));
    }
}

TEST(ForcePlane, Superposition) {
    std::mt19937_64 rng(12);
    const SpaceSpec sp = SpaceSpec::plane(0.3, -1);
    const LagrangeParams m{0.4, -0.3, 0.2};
    for (int i = 0; i < 100; ++i) {
        const Eigen::Vector2d p = random_point(rng, sp);
        const Eigen::Vector2d sum = force_plane(p, {m.m1, 0, 0}, sp) + force_plane(p, {0, m.m2, 0}, sp) +
                                    force_plane(p, {0, 0, m.f}, sp);
        EXPECT_LT((force_plane(p, m, sp) - sum).norm(), 1e-14 * std::max(1.0, sum.norm()));
    }
}

TEST(ForceCurved, HookeVanishesAtPole) {
    for (const SpaceSpec& sp : {kSphere, kHyper})
        EXPECT_LT(force_curved(AmbientPoint{{0.0, 0.0, -1.0}}, {0.0, 0.0, 1.0}, sp).comps.norm(), 1e-16);
}

TEST(ForceCurved, HyperbolicHookeMagnitude) {
    const double th = std::atanh(0.5);
    const AmbientPoint q{{std::sinh(th), 0.0, -std::cosh(th)}};
    const Eigen::Vector3d F = force_curved(q, {0.0, 0.0, 1.0}, kHyper).comps;
    const double mag = std::sqrt(minkowski_dot(F, F));
    EXPECT_NEAR(mag, 2.0 * std::sinh(th) / std::pow(std::cosh(th), 3), 1e-14);
    const double h = 1e-5;
    const double fd = (std::pow(std::tanh(th + h), 2) - std::pow(std::tanh(th - h), 2)) / (2 * h);
    EXPECT_LT(std::abs(mag - fd), 1e-6);
    // Points away from the pole for f > 0.
    EXPECT_GT(minkowski_dot(F, Eigen::Vector3d(std::cosh(th), 0.0, -std::sinh(th))), 0.0);
}

TEST(ForceCurved, IsGradientOfForceFunction) {
    std::mt19937_64 rng(13);
    const LagrangeParams m{0.4, -0.3, 0.2};
    for (const SpaceSpec& sp : {kSphere, kHyper}) {
        for (int i = 0; i < 100; ++i) {
            const AmbientPoint q = central_lift_up(GnomonicPoint{random_point(rng, sp)}, sp);
            const Eigen::Vector3d w = tangent_project(q, test::random_normal3(rng), sp).comps;
            const double h = 1e-6;
            auto U = [&](double e) {
                return force_function_curved(project_to_manifold(q.coords + e * w, sp), m, sp);
            };
            const double fd = (U(h) - U(-h)) / (2 * h);
            const double an = ambient_dot(force_curved(q, m, sp).comps, w, sp);
            EXPECT_LT(std::abs(fd - an), 1e-5 * std::max(1.0, std::abs(an)));
        }
    }
}

TEST(ForceCurved, Superposition) {
    std::mt19937_64 rng(14);
    const LagrangeParams m{0.4, -0.3, 0.2};
    for (const SpaceSpec& sp : {kSphere, kHyper}) {
        for (int i = 0; i < 100; ++i) {
            const AmbientPoint q = central_lift_up(GnomonicPoint{random_point(rng, sp)}, sp);
            const Eigen::Vector3d sum = force_curved(q, {m.m1, 0, 0}, sp).comps + force_curved(q, {0, m.m2, 0}, sp).comps +
                                        force_curved(q, {0, 0, m.f}, sp).comps;
            EXPECT_LT((force_curved(q, m, sp).comps - sum).norm(), 1e-14 * std::max(1.0, sum.norm()));
        }
    }
}

TEST(EnergyPlane, Examples) {
    EXPECT_DOUBLE_EQ(energy_plane({0.3, 0.2}, {1.0, 0.0}, {}, SpaceSpec::plane(0.5)), 0.5);
    EXPECT_DOUBLE_EQ(energy_plane({1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0, -1.0}, SpaceSpec::plane(0.0)), 1.0);
}

TEST(EnergyPlane, MatchesWrittenFormula) {
    std::mt19937_64 rng(15);
    const LagrangeParams m{0.4, -0.3, 0.2};
    const SpaceSpec sp = SpaceSpec::plane(0.5, +1);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Vector2d p = random_point(rng, sp), v = test::random_normal2(rng);
        EXPECT_NEAR(energy_plane(p, v, m, sp), plane_energy(p, v, m, 0.5), 1e-13);
    }
}

TEST(EnergyCurvedInChart, Examples) {
    EXPECT_DOUBLE_EQ(energy_curved_in_chart({0.0, 0.0}, {1.0, 0.0}, {}, kSphere), 0.5);
    EXPECT_DOUBLE_EQ(energy_curved_in_chart({0.0, 1.0}, {1.0, 0.0}, {}, kSphere), 1.0);
}

TEST(EnergyCurvedInChart, MatchesWrittenSphereFormula) {
    std::mt19937_64 rng(16);
    const LagrangeParams m{0.4, -0.3, 0.2};
    for (int i = 0; i < 100; ++i) {
        const Eigen::Vector2d p = random_point(rng, kSphere), v = test::random_normal2(rng);
        EXPECT_NEAR(energy_curved_in_chart(p, v, m, kSphere), sphere_chart_energy(p, v, m, 0.5), 1e-12);
    }
}

TEST(EnergyCurvedInChart, AgreesWithAmbientEnergy) {
    std::mt19937_64 rng(17);
    const LagrangeParams m{0.4, -0.3, 0.2};
    for (const SpaceSpec& sp : {kSphere, kHyper}) {
        for (int i = 0; i < 100; ++i) {
            const PlaneState ps{GnomonicPoint{random_point(rng, sp)}, GnomonicVector{test::random_normal2(rng)}, 0.0};
            const CurvedState cs = partner_state(ps, sp);
            EXPECT_NEAR(energy_curved(cs.pos, cs.vel, m, sp), energy_curved_in_chart(ps.pos.coords, ps.vel.comps, m, sp),
                        1e-11);
        }
    }
}

TEST(EnergyPair, FreeAtPole) {
    const EnergyPair e = energy_pair(AmbientPoint{{0.0, 0.0, -1.0}}, AmbientVector{{1.0, 0.0, 0.0}}, {}, kSphere);
    EXPECT_NEAR(e.e_native, 0.5, 1e-15);
    EXPECT_NEAR(e.e_partner, 0.5, 1e-15);
    const EnergyPair f = energy_pair(GnomonicPoint{{0.0, 0.0}}, GnomonicVector{{1.0, 0.0}}, {}, SpaceSpec::plane(0.4, -1));
    EXPECT_NEAR(f.e_native, 0.5, 1e-15);
    EXPECT_NEAR(f.e_partner, 0.5, 1e-15);
}

TEST(EnergyPair, SwapsUnderPartnerState) {
    std::mt19937_64 rng(18);
    const LagrangeParams m{0.4, -0.3, 0.2};
    for (const SpaceSpec& sp : {kSphere, kHyper}) {
        for (int i = 0; i < 50; ++i) {
            const PlaneState ps{GnomonicPoint{random_point(rng, sp)}, GnomonicVector{test::random_normal2(rng)}, 0.0};
            const CurvedState cs = partner_state(ps, sp);
            const EnergyPair ec = energy_pair(cs.pos, cs.vel, m, sp);
            const EnergyPair ep = energy_pair(ps.pos, ps.vel, partner_params(m, sp), sp.partner());
            EXPECT_NEAR(ec.e_native, ep.e_partner, 1e-11);
            EXPECT_NEAR(ec.e_partner, ep.e_native, 1e-11);
        }
    }
}

TEST(ExtendedIntegral, AgreesWithPlanarEnergy) {
    std::mt19937_64 rng(19);
    const LagrangeParams m{0.4, -0.3, 0.2};
    for (int i = 0; i < 50; ++i) {
        const PlaneState ps{GnomonicPoint{random_point(rng, kSphere)}, GnomonicVector{test::random_normal2(rng)}, 0.0};
        const CurvedState cs = partner_state(ps, kSphere);
        const double planar = energy_plane(ps.pos.coords, ps.vel.comps, partner_params(m, kSphere), kSphere.partner());
        EXPECT_NEAR(extended_integral_on_sphere(cs.pos, cs.vel, m, kSphere), planar, 1e-10 * std::max(1.0, std::abs(planar)));
    }
}

TEST(ExtendedIntegral, Examples) {
    const SpaceSpec a0 = SpaceSpec::sphere(0.0);
    EXPECT_NEAR(extended_integral_on_sphere(AmbientPoint{{0, 0, -1}}, AmbientVector{{1, 0, 0}}, {}, a0), 0.5, 1e-15);
    const Eigen::Vector3d q = Eigen::Vector3d(0.3, -0.4, -0.5).normalized();
    EXPECT_NEAR(extended_integral_on_sphere(AmbientPoint{q}, AmbientVector{Eigen::Vector3d::Zero()}, {0, 0, 1.0}, a0),
                -(q.x() * q.x() + q.y() * q.y()) / (q.z() * q.z()), 1e-14);
}

TEST(ExtendedIntegral, DefinedOnNorthernHemisphere) {
    const Eigen::Vector3d q = Eigen::Vector3d(0.3, -0.4, 0.5).normalized();
    const Eigen::Vector3d v = tangent_project(AmbientPoint{q}, Eigen::Vector3d(0.2, 0.1, 0.3), kSphere).comps;
    EXPECT_TRUE(std::isfinite(extended_integral_on_sphere(AmbientPoint{q}, AmbientVector{v}, {0.3, 0.2, -0.1}, kSphere)));
}

namespace {

// Hooke-dominated orbit that stays at distance > 0.08 from both centers.
const LagrangeParams kBound{0.05, 0.03, -0.5};

IntegratorOptions reference_tolerance() {
    IntegratorOptions o;
    o.rtol = o.atol = 1e-12;
    return o;
}

}  // namespace

TEST(Conservation, PlanarUnreflectedOrbit) {
    const SpaceSpec sp = SpaceSpec::plane(0.5, +1);
    PlaneState s{GnomonicPoint{{0.3, 0.0}}, GnomonicVector{{0.0, 0.8}}, 0.0};
    const double e0 = energy_plane(s.pos.coords, s.vel.comps, kBound, sp);
    double h = 1e-3, drift = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto r = step(s, kBound, sp, h, reference_tolerance());
        s = r.state;
        h = r.h_next;
        drift = std::max(drift, std::abs(energy_plane(s.pos.coords, s.vel.comps, kBound, sp) - e0));
    }
    EXPECT_LT(drift, 1e-9);
}

TEST(Conservation, CurvedOrbitInChart) {
    for (const SpaceSpec& sp : {kSphere, kHyper}) {
        CurvedState s = partner_state(PlaneState{GnomonicPoint{{0.3, 0.0}}, GnomonicVector{{0.0, 0.8}}, 0.0}, sp);
        auto chart_energy = [&](const CurvedState& c) {
            const PlaneState p = partner_state(c, sp);
            return energy_curved_in_chart(p.pos.coords, p.vel.comps, kBound, sp);
        };
        const double e0 = chart_energy(s);
        double h = 1e-3, drift = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const auto r = step(s, kBound, sp, h, reference_tolerance());
            s = r.state;
            h = r.h_next;
            drift = std::max(drift, std::abs(chart_energy(s) - e0));
        }
        EXPECT_LT(drift, 1e-8) << to_string(sp.kind);
    }
}
