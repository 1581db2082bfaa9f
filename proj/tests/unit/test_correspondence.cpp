#include <cmath>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "billiards/correspondence.hpp"
#include "billiards/presets.hpp"
#include "billiards/scenario.hpp"
#include "test_util.hpp"

using namespace billiards;

namespace {

const SpaceSpec kSphere = SpaceSpec::sphere(0.5);
const SpaceSpec kHyper = SpaceSpec::hyperboloid(0.4);

CurvedState curved_state(const Eigen::Vector2d& p, const Eigen::Vector3d& dir, const SpaceSpec& sp) {
    const AmbientPoint q = central_lift_up(GnomonicPoint{p}, sp);
    return {q, tangent_project(q, dir, sp), 0.0};
}

CurvedRecord run_curved(const std::string& preset, double sample_dt) {
    const Scenario s = *find_preset(preset);
    SimulationLimits lim = s.limits;
    lim.sample_dt = sample_dt;
    return simulate(curved_init(s), s.params, s.space, s.wall, lim, s.integrator_options());
}

// |det| of the velocity Jacobian of the two energies by central differences.
double fd_independence(const Eigen::Vector2d& p, const Eigen::Vector2d& v, const LagrangeParams& params,
                       const SpaceSpec& plane) {
    const SpaceSpec curved = plane.partner();
    const LagrangeParams cp = partner_params(params, plane);
    const double h = 1e-6;
    Eigen::Matrix2d J;
    for (int k = 0; k < 2; ++k) {
        Eigen::Vector2d e = Eigen::Vector2d::Zero();
        e[k] = h;
        J(0, k) = (energy_plane(p, v + e, params, plane) - energy_plane(p, v - e, params, plane)) / (2 * h);
        J(1, k) = (energy_curved_in_chart(p, v + e, cp, curved) - energy_curved_in_chart(p, v - e, cp, curved)) / (2 * h);
    }
    return std::abs(J.determinant());
}

}  // namespace

TEST(ProjectTrajectory, DownThenUpIsIdentity) {
    const CurvedRecord rec = run_curved("lagrange-full-sphere", 0.01);
    const CurvedRecord back = project_trajectory(project_trajectory(rec, Direction::Down), Direction::Up);
    ASSERT_EQ(back.samples.size(), rec.samples.size());
    ASSERT_EQ(back.events.size(), rec.events.size());
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        EXPECT_LT((back.samples[i].state.pos.coords - rec.samples[i].state.pos.coords).norm(), 1e-10);
        EXPECT_LT((back.samples[i].state.vel.comps - rec.samples[i].state.vel.comps).norm(), 1e-10);
    }
}

TEST(ProjectTrajectory, EventsLandOnImageWall) {
    for (const char* name : {"lagrange-full-sphere", "lagrange-full-hyperbolic", "lagrange-combination-sphere"}) {
        const Scenario s = *find_preset(name);
        const CurvedRecord rec = run_curved(name, 0.01);
        const PlaneRecord down = project_trajectory(rec);
        ASSERT_FALSE(down.events.empty()) << name;
        for (const auto& ev : down.events) {
            const ConicSpec image = project_conic(s.wall.members[ev.wall_index], Direction::Down);
            EXPECT_LT(std::abs(implicit_eval(image, ev.pos.coords)), 1e-8) << name;
        }
    }
}

TEST(ProjectTrajectory, EnergiesAreSwapped) {
    const CurvedRecord rec = run_curved("hooke-confocal-sphere", 0.05);
    const PlaneRecord down = project_trajectory(rec);
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        EXPECT_EQ(down.samples[i].energies.e_native, rec.samples[i].energies.e_partner);
        EXPECT_EQ(down.samples[i].energies.e_partner, rec.samples[i].energies.e_native);
    }
}

TEST(ComparePointSets, SelfComparisonIsZero) {
    const CurvedRecord rec = run_curved("birkhoff-ellipse-sphere", 0.01);
    const auto c = compare_point_sets(rec, rec);
    EXPECT_FALSE(c.structural_mismatch);
    EXPECT_EQ(c.max_distance, 0.0);
}

TEST(ComparePointSets, IndependentOfSamplingCadence) {
    const auto c = compare_point_sets(run_curved("birkhoff-ellipse-sphere", 0.005), run_curved("birkhoff-ellipse-sphere", 0.0035));
    EXPECT_FALSE(c.structural_mismatch) << c.detail;
    EXPECT_LT(c.max_distance, 1e-8);
}

TEST(ComparePointSets, BounceCountMismatchIsStructural) {
    const Scenario s = *find_preset("birkhoff-ellipse-sphere");
    SimulationLimits lim = s.limits;
    lim.bounce_max = 5;
    const auto a = simulate(curved_init(s), s.params, s.space, s.wall, lim);
    lim.bounce_max = 6;
    const auto b = simulate(curved_init(s), s.params, s.space, s.wall, lim);
    EXPECT_TRUE(compare_point_sets(a, b).structural_mismatch);
}

TEST(Independence, ExamplesAtOrigin) {
    const PlaneState s{GnomonicPoint{{0.0, 0.0}}, GnomonicVector{{1.0, 1.0}}, 0.0};
    const LagrangeParams params{0.3, 0.2, 0.1};
    // With coincident centers the two kinetic terms agree at the origin.
    EXPECT_NEAR(independence_check(s, params, SpaceSpec::plane(0.0, +1)), 0.0, 1e-14);
    EXPECT_NEAR(independence_check(s, params, SpaceSpec::plane(1.0, +1)), 0.5, 1e-14);
    EXPECT_NEAR(independence_check(s, params, SpaceSpec::plane(1.0, +1)),
                fd_independence({0.0, 0.0}, {1.0, 1.0}, params, SpaceSpec::plane(1.0, +1)), 1e-8);
}

TEST(Independence, MatchesFiniteDifferencesAndIsGeneric) {
    std::mt19937_64 rng(41);
    for (const SpaceSpec& plane : {SpaceSpec::plane(0.6, +1), SpaceSpec::plane(0.6, -1)}) {
        const LagrangeParams params{0.2, 0.15, -0.1};
        int nonzero = 0;
        const int n = 2000;
        for (int i = 0; i < n; ++i) {
            const Eigen::Vector2d p = test::random_disc(rng, 0.9);
            if ((p - chart_centers(plane)[0]).norm() < 1e-2 || (p - chart_centers(plane)[1]).norm() < 1e-2) continue;
            const Eigen::Vector2d v = test::random_normal2(rng);
            const double d = independence_check(PlaneState{GnomonicPoint{p}, GnomonicVector{v}, 0.0}, params, plane);
            EXPECT_NEAR(d, fd_independence(p, v, params, plane), 1e-6 * std::max(1.0, d));
            if (d > 1e-8) ++nonzero;
        }
        EXPECT_GE(nonzero, static_cast<int>(0.99 * n));
    }
}

TEST(PartnerState, RoundTrip) {
    std::mt19937_64 rng(42);
    for (const SpaceSpec& sp : {kSphere, kHyper}) {
        for (int i = 0; i < 100; ++i) {
            const CurvedState s = curved_state(test::random_disc(rng, 0.8), test::random_normal3(rng), sp);
            const CurvedState back = partner_state(partner_state(s, sp), sp);
            EXPECT_LT((back.pos.coords - s.pos.coords).norm(), 1e-13);
            EXPECT_LT((back.vel.comps - s.vel.comps).norm(), 1e-12);
        }
    }
}

TEST(ProjectedAcceleration, MatchesPlanarForce) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const SpaceSpec& sp : {kSphere, kHyper}) {
        for (int k = 0; k < 10; ++k) {
            const LagrangeParams params{u(rng), u(rng), u(rng)};
            const LagrangeParams planar = partner_params(params, sp);
            for (int i = 0; i < 50; ++i) {
                const Eigen::Vector2d p = test::random_disc(rng, 0.8);
                const auto centers = chart_centers(sp);
                if ((p - centers[0]).norm() < 0.05 || (p - centers[1]).norm() < 0.05) continue;
                const CurvedState s = curved_state(p, test::random_normal3(rng), sp);
                const Eigen::Vector2d got = projected_acceleration(s, params, sp);
                const Eigen::Vector2d want = force_plane(p, planar, sp.partner());
                EXPECT_LT((got - want).norm(), 1e-10 * std::max(1.0, want.norm()));
            }
        }
    }
}

TEST(ProjectedAcceleration, MatchesFiniteDifferencesOfTheFlow) {
    std::mt19937_64 rng(44);
    const LagrangeParams params{-0.3, 0.2, -0.15};
    for (const SpaceSpec& sp : {kSphere, kHyper}) {
        for (int i = 0; i < 20; ++i) {
            const CurvedState s = curved_state(test::random_disc(rng, 0.6) + Eigen::Vector2d(0.1, 0.0), test::random_normal3(rng), sp);
            const double d = 1e-4;
            auto chart = [&](const CurvedState& x) { return central_project_down(x.pos, sp).coords; };
            auto rate = [&](const Eigen::Vector2d& p) { return 1.0 + sp.formula_sign() * p.squaredNorm(); };
            const Eigen::Vector2d pm = chart(fixed_step(s, params, sp, -d)), p0 = chart(s), pp = chart(fixed_step(s, params, sp, d));
            const Eigen::Vector2d dp = (pp - pm) / (2 * d);
            const Eigen::Vector2d ddp = (pp - 2 * p0 + pm) / (d * d);
            const double R = rate(p0), dR = (rate(pp) - rate(pm)) / (2 * d);
            const Eigen::Vector2d want = ddp / (R * R) - dp * dR / (R * R * R);
            const Eigen::Vector2d got = projected_acceleration(s, params, sp);
            EXPECT_LT((got - want).norm(), 1e-5 * std::max(1.0, want.norm()));
        }
    }
}

TEST(Twin, CurvedAndPlanarOrbitsCoincide) {
    for (const char* name : {"birkhoff-ellipse-sphere", "lagrange-full-sphere", "lagrange-full-hyperbolic", "two-center-confocal-sphere",
                             "lagrange-combination-hyperbolic"}) {
        const Scenario s = *find_preset(name);
        SimulationLimits lim = s.limits;
        lim.sample_dt = 0.0025;
        const TwinResult tw = twin_simulation(curved_init(s), s.params, s.space, s.wall, lim);
        EXPECT_FALSE(tw.comparison.structural_mismatch) << name << ": " << tw.comparison.detail;
        EXPECT_LT(tw.comparison.max_distance, 1e-6) << name;
        ASSERT_GE(tw.plane.events.size(), tw.curved.events.size()) << name;
        for (std::size_t i = 0; i < tw.curved.events.size(); ++i)
            EXPECT_EQ(tw.plane.events[i].wall_index, tw.curved.events[i].wall_index) << name;
    }
}
