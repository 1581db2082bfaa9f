#include "billiards/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "billiards/presets.hpp"
#include "billiards/runner.hpp"

namespace billiards {

namespace {

constexpr int kStatesPerSet = 100;
constexpr int kParamSets = 10;
constexpr int kWallSamples = 200;
constexpr int kIndependenceStates = 10000;

bool near_centers(const Eigen::Vector2d& p, const SpaceSpec& space, double r) {
    for (const auto& c : chart_centers(space))
        if ((p - c).norm() < r) return true;
    return false;
}

Eigen::Vector2d random_chart_point(std::mt19937_64& rng, const SpaceSpec& space) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double R = space.formula_sign() > 0 ? 1.5 : 0.9;
    while (true) {
        Eigen::Vector2d p(R * u(rng), R * u(rng));
        if (p.norm() < R && !near_centers(p, space, 0.05)) return p;
    }
}

double force_correspondence(std::mt19937_64& rng, int sign) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int k = 0; k < kParamSets; ++k) {
        const double a = 0.8 * u(rng);
        const SpaceSpec curved = sign > 0 ? SpaceSpec::sphere(a) : SpaceSpec::hyperboloid(a);
        const LagrangeParams params{u(rng), u(rng), u(rng)};
        const LagrangeParams planar = partner_params(params, curved);
        const SpaceSpec plane = curved.partner();
        for (int i = 0; i < kStatesPerSet; ++i) {
            const PlaneState ps{GnomonicPoint{random_chart_point(rng, curved)}, GnomonicVector{Eigen::Vector2d(g(rng), g(rng))}, 0.0};
            const CurvedState cs = partner_state(ps, plane);
            const Eigen::Vector2d lhs = projected_acceleration(cs, params, curved);
            const Eigen::Vector2d rhs = force_plane(ps.pos.coords, planar, plane);
            worst = std::max(worst, (lhs - rhs).norm() / std::max(rhs.norm(), 1e-300));
        }
    }
    return worst;
}

struct WallStats {
    double implicit = 0.0;
    double normal_angle = 0.0;
    double reflect = 0.0;
};

void wall_correspondence(std::mt19937_64& rng, const SpaceSpec& curved, const ConicSpec& member, WallStats& st) {
    std::normal_distribution<double> g;
    const ConicSpec down = project_conic(member, Direction::Down);
    const SpaceSpec plane = curved.partner();
    for (const auto& c : sample_conic_chart(member, kWallSamples)) {
        const AmbientPoint q = central_lift_up(GnomonicPoint{c}, curved);
        const Eigen::Vector2d p = central_project_down(q, curved).coords;
        st.implicit = std::max(st.implicit, std::abs(implicit_eval(down, p)));

        const Eigen::Vector2d pushed = pushforward_velocity(q, AmbientVector{normal_at(member, q.coords)}, curved).comps;
        const Eigen::Vector2d n = normal_at(down, p);
        const Eigen::Vector2d perp = pushed - affine_dot(pushed, n, plane) * n;
        st.normal_angle = std::max(st.normal_angle, affine_norm(perp, plane) / affine_norm(pushed, plane));

        const CurvedState cs{q, tangent_project(q, Eigen::Vector3d(g(rng), g(rng), g(rng)), curved), 0.0};
        const PlaneState a = partner_state(reflect(cs, member, curved), curved);
        PlaneState pin = partner_state(cs, curved);
        pin.pos.coords = p;
        const PlaneState b = reflect(pin, down, plane);
        st.reflect = std::max(st.reflect, (a.vel.comps - b.vel.comps).norm() / std::max(1.0, b.vel.comps.norm()));
    }
}

double independence_fraction(std::mt19937_64& rng, const SpaceSpec& plane) {
    std::normal_distribution<double> g;
    const LagrangeParams params{0.7, -0.4, 0.3};
    int good = 0;
    for (int i = 0; i < kIndependenceStates; ++i) {
        const PlaneState s{GnomonicPoint{random_chart_point(rng, plane)}, GnomonicVector{Eigen::Vector2d(g(rng), g(rng))}, 0.0};
        if (independence_check(s, params, plane) > 1e-8) ++good;
    }
    return static_cast<double>(good) / kIndependenceStates;
}

std::string fmt(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", a);
    return buf;
}

void merge(Report& into, const RunResult& r, const std::string& prefix) {
    for (auto c : r.report.checks) {
        c.name = prefix + "/" + c.name;
        into.add(c);
    }
    if (!r.diagnostic.empty()) {
        into.add({prefix + "/completed", 0.0, 0.5, CheckMode::Min, false, r.diagnostic});
    }
}

}  // namespace

Report verify_projective(std::uint64_t seed) {
    Report rep;
    rep.name = "projective";
    rep.note("seed", std::to_string(seed));
    std::mt19937_64 rng(seed);

    rep.add({"force_correspondence/sphere", force_correspondence(rng, +1), 1e-8, CheckMode::Max, false, {}});
    rep.add({"force_correspondence/hyperboloid", force_correspondence(rng, -1), 1e-8, CheckMode::Max, false, {}});

    struct WallCase {
        SpaceSpec space;
        std::vector<std::pair<double, Branch>> members;
    };
    const WallCase walls[] = {
        {SpaceSpec::sphere(0.5), {{1.2, Branch::Both}, {0.7, Branch::Both}, {0.3, Branch::Both}}},
        {SpaceSpec::hyperboloid(0.4), {{0.8, Branch::Both}, {0.6, Branch::Both}, {0.2, Branch::Both}}},
    };
    for (const auto& wc : walls) {
        WallStats st;
        for (const auto& [B, br] : wc.members) wall_correspondence(rng, wc.space, ConicSpec::from_B(wc.space, B, br), st);
        const std::string tag = to_string(wc.space.kind);
        rep.add({"wall_implicit/" + tag, st.implicit, 1e-10, CheckMode::Max, false, {}});
        rep.add({"wall_normal_angle/" + tag, st.normal_angle, 1e-8, CheckMode::Max, false, {}});
        rep.add({"wall_reflection_commutes/" + tag, st.reflect, 1e-8, CheckMode::Max, false, {}});
    }

    for (double a : {0.3, 0.6, 1.0})
        rep.add({"independence/sphere-partner/a=" + fmt(a), independence_fraction(rng, SpaceSpec::plane(a, +1)), 0.99,
                 CheckMode::Min, false, {}});
    for (double a : {0.3, 0.6})
        rep.add({"independence/hyperboloid-partner/a=" + fmt(a), independence_fraction(rng, SpaceSpec::plane(a, -1)),
                 0.99, CheckMode::Min, false, {}});

    for (const char* name : {"lagrange-full-sphere", "lagrange-full-hyperbolic"}) {
        const RunResult r = run_scenario(*find_preset(name));
        merge(rep, r, name);
    }
    return rep;
}

Report verify_conformal() {
    Report rep;
    rep.name = "conformal";
    for (const char* name : {"conformal-orbit-correspondence", "conformal-confocal-image"}) {
        const RunResult r = run_scenario(*find_preset(name));
        merge(rep, r, name);
    }
    return rep;
}

}  // namespace billiards
