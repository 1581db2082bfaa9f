// Acceptance run: one PASS/FAIL line per criterion. Reference quantities are recomputed here
// from closed forms rather than taken from the library wherever that is practical.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "billiards/conformal.hpp"
#include "billiards/correspondence.hpp"
#include "billiards/presets.hpp"
#include "billiards/runner.hpp"
#include "billiards/scenario.hpp"

using namespace billiards;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

namespace oracle {

double dot3(int s, const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    return s > 0 ? u.dot(v) : u.x() * v.x() + u.y() * v.y() - u.z() * v.z();
}

double dot2(double k, const Eigen::Vector2d& u, const Eigen::Vector2d& v) { return u.x() * v.x() + u.y() * v.y() / k; }

Eigen::Vector3d lift(int s, const Eigen::Vector2d& p) {
    return Eigen::Vector3d(p.x(), p.y(), -1.0) / std::sqrt(1.0 + s * p.squaredNorm());
}

Eigen::Vector2d down(const Eigen::Vector3d& q) { return {-q.x() / q.z(), -q.y() / q.z()}; }

Eigen::Vector2d push(const Eigen::Vector3d& q, const Eigen::Vector3d& v) {
    const double z = q.z();
    return {-v.x() / z + q.x() * v.z() / (z * z), -v.y() / z + q.y() * v.z() / (z * z)};
}

// Projection onto the tangent plane of the unit sphere / upper sheet through q.
Eigen::Vector3d tangent(int s, const Eigen::Vector3d& q, const Eigen::Vector3d& v) {
    return v - s * dot3(s, v, q) * q;
}

// Metric gradient from a Euclidean one.
Eigen::Vector3d raise(int s, Eigen::Vector3d g) {
    if (s < 0) g.z() = -g.z();
    return g;
}

// Tangential force of m1 cot th1 + m2 cot th2 + f tan^2 th (hyperbolic analogues for s < 0).
Eigen::Vector3d curved_force(int s, double a, const LagrangeParams& P, const Eigen::Vector3d& q) {
    const double r = std::sqrt(1.0 + s * a * a);
    const Eigen::Vector3d c[2] = {Eigen::Vector3d(0, a, -1) / r, Eigen::Vector3d(0, -a, -1) / r};
    const double m[2] = {P.m1, P.m2};
    Eigen::Vector3d grad = Eigen::Vector3d::Zero();
    for (int i = 0; i < 2; ++i) {
        // d/dq of cot: (1 - C^2)^{-3/2} dC/dq on the sphere, -(C^2 - 1)^{-3/2} dC/dq with C = -<q, c>.
        if (s > 0) {
            const double C = q.dot(c[i]);
            grad += m[i] * std::pow(1.0 - C * C, -1.5) * c[i];
        } else {
            const double C = -dot3(-1, q, c[i]);
            grad += m[i] * std::pow(C * C - 1.0, -1.5) * Eigen::Vector3d(c[i].x(), c[i].y(), -c[i].z());
        }
    }
    // f (1/z^2 - 1) on the sphere, f (1 - 1/z^2) on the hyperboloid.
    grad.z() += -2.0 * s * P.f / (q.z() * q.z() * q.z());
    return tangent(s, q, raise(s, grad));
}

// Acceleration of the central projection in the time dtau = (1 + s |p|^2) dt.
Eigen::Vector2d projected_accel(int s, double a, const LagrangeParams& P, const Eigen::Vector3d& q,
                                const Eigen::Vector3d& v) {
    const Eigen::Vector3d acc = curved_force(s, a, P, q) + (s > 0 ? -v.squaredNorm() : dot3(-1, v, v)) * q;
    const double z = q.z(), vz = v.z(), az = acc.z();
    Eigen::Vector2d p, dp, ddp;
    for (int i = 0; i < 2; ++i) {
        p[i] = -q[i] / z;
        dp[i] = -v[i] / z + q[i] * vz / (z * z);
        ddp[i] = -acc[i] / z + v[i] * vz / (z * z) + (v[i] * vz + q[i] * az) / (z * z) - 2.0 * q[i] * vz * vz / (z * z * z);
    }
    const double R = 1.0 + s * p.squaredNorm();
    const double dR = 2.0 * s * p.dot(dp);
    return ddp / (R * R) - dp * dR / (R * R * R);
}

double det_velocity(int s, double a, const Eigen::Vector2d& p, const Eigen::Vector2d& v) {
    const double k = 1.0 + s * a * a;
    const double L = v.x() * p.y() - p.x() * v.y();
    // Rows: d/dv of 1/2 (vx^2 + vy^2 / k) and of 1/2 (|v|^2 + s L^2).
    const double a11 = v.x(), a12 = v.y() / k;
    const double a21 = v.x() + s * L * p.y(), a22 = v.y() - s * L * p.x();
    return std::abs(a11 * a22 - a12 * a21);
}

double hooke_h(bool sphere, double f, cplx z, cplx w) {
    const double r = std::norm(z);
    if (sphere) return (1 + r) * (1 + r) * std::norm(w) / 8 + 4 * f * r / ((1 - r) * (1 - r));
    return (1 - r) * (1 - r) * std::norm(w) / 8 + 4 * f * r / ((1 + r) * (1 + r));
}

double kepler_h(double mu, cplx q, cplx p) {
    const double r = std::norm(q);
    return (1 - r) * (1 - r) * std::norm(p) / 8 - mu * (1 + r) / (2 * std::sqrt(r));
}

}  // namespace oracle

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Outcome& o, double secs) {
    std::printf("%s criterion %d: %s (%s; %.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::vector<Scenario> billiard_presets() {
    std::vector<Scenario> out;
    for (const auto& s : presets())
        if (s.kind == ScenarioKind::Billiard) out.push_back(s);
    return out;
}

Outcome force_correspondence() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ua(0.1, 0.7);
    std::normal_distribution<double> g;
    double worst = 0.0;
    int evaluated = 0;
    for (int s : {+1, -1}) {
        for (int set = 0; set < 10; ++set) {
            const double a = ua(rng);
            const LagrangeParams P{u(rng), u(rng), u(rng)};
            const double k = 1.0 + s * a * a;
            const LagrangeParams planar{P.m1 / std::sqrt(k), P.m2 / std::sqrt(k), P.f};
            const SpaceSpec plane = SpaceSpec::plane(a, s);
            for (int n = 0; n < 100;) {
                const Eigen::Vector2d p(0.8 * u(rng), 0.8 * u(rng));
                if (p.norm() > 0.8 || (p - Eigen::Vector2d(0, a)).norm() < 0.05 || (p + Eigen::Vector2d(0, a)).norm() < 0.05)
                    continue;
                const Eigen::Vector3d q = oracle::lift(s, p);
                const Eigen::Vector3d v = oracle::tangent(s, q, Eigen::Vector3d(g(rng), g(rng), g(rng)));
                const Eigen::Vector2d got = oracle::projected_accel(s, a, P, q, v);
                const Eigen::Vector2d want = force_plane(p, planar, plane);
                worst = std::max(worst, (got - want).norm() / want.norm());
                ++evaluated;
                ++n;
            }
        }
    }
    return {worst < 1e-8, std::to_string(evaluated) + " states, max relative error " + fmt("%.2e", worst)};
}

struct Series {
    double drift = 0.0;
    double variation = 0.0;
    double first_jump = 0.0;
};

template <Chart C>
Series energy_series(const TrajectoryRecord<C>& rec) {
    Series out;
    const auto energies = [&](const auto& pos, const auto& vel) { return energy_pair(pos, vel, rec.params, rec.space); };
    const EnergyPair e0 = energies(rec.samples.front().state.pos, rec.samples.front().state.vel);
    double prev = e0.e_partner;
    std::size_t next_event = 0;
    for (const auto& smp : rec.samples) {
        // Splice in the pre-reflection value of every event up to this sample.
        while (next_event < rec.events.size() && rec.events[next_event].t <= smp.state.t) {
            const auto& ev = rec.events[next_event++];
            const EnergyPair b = energies(ev.pos, ev.v_in), a = energies(ev.pos, ev.v_out);
            out.drift = std::max({out.drift, std::abs(b.e_native - e0.e_native), std::abs(a.e_native - e0.e_native)});
            out.variation += std::abs(b.e_partner - prev) + std::abs(a.e_partner - b.e_partner);
            prev = a.e_partner;
        }
        const EnergyPair e = energies(smp.state.pos, smp.state.vel);
        out.drift = std::max(out.drift, std::abs(e.e_native - e0.e_native));
        out.variation += std::abs(e.e_partner - prev);
        prev = e.e_partner;
    }
    if (!rec.events.empty()) {
        const auto& ev = rec.events.front();
        out.first_jump = std::abs(energies(ev.pos, ev.v_out).e_partner - energies(ev.pos, ev.v_in).e_partner);
    }
    return out;
}

Outcome partner_integral() {
    Outcome o;
    double worst_drift = 0.0, worst_var = 0.0, worst_time = 0.0, control_jump = 0.0;
    int runs = 0;
    for (const Scenario& s : billiard_presets()) {
        const auto t0 = Clock::now();
        const RunResult r = run_scenario(s);
        const double secs = seconds_since(t0);
        worst_time = std::max(worst_time, secs);
        if (r.numerical_failure || r.config_error || secs >= 60.0) {
            o.pass = false;
            o.detail += s.name + " did not complete; ";
            continue;
        }
        const Series e = r.plane ? energy_series(*r.plane) : energy_series(*r.curved);
        const std::size_t events = r.plane ? r.plane->events.size() : r.curved->events.size();
        if (s.wall.confocal()) {
            ++runs;
            worst_drift = std::max(worst_drift, e.drift);
            worst_var = std::max(worst_var, e.variation);
            if (!(e.drift < 1e-9 && e.variation < 1e-7 && events == 20)) {
                o.pass = false;
                o.detail += s.name + " drift " + fmt("%.2e", e.drift) + " variation " + fmt("%.2e", e.variation) +
                            " events " + std::to_string(events) + "; ";
            }
        } else {
            control_jump = std::max(control_jump, e.first_jump);
            if (!(e.first_jump > 1e-3)) {
                o.pass = false;
                o.detail += s.name + " first jump " + fmt("%.2e", e.first_jump) + "; ";
            }
        }
    }
    o.detail += std::to_string(runs) + " confocal runs, max drift " + fmt("%.2e", worst_drift) + ", max variation " +
                fmt("%.2e", worst_var) + ", control jump " + fmt("%.3f", control_jump) + ", slowest " +
                fmt("%.2f s", worst_time);
    return o;
}

Outcome wall_correspondence() {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    double worst_implicit = 0.0, worst_angle = 0.0, worst_commute = 0.0;
    int points = 0;
    const std::pair<SpaceSpec, std::vector<double>> cases[] = {{SpaceSpec::sphere(0.5), {1.2, 0.7, 0.3}},
                                                               {SpaceSpec::hyperboloid(0.4), {0.8, 0.6, 0.2}}};
    for (const auto& [space, Bs] : cases) {
        const int s = space.sign();
        const double a = space.a, k = 1.0 + s * a * a;
        for (double B : Bs) {
            const ConicSpec conic = ConicSpec::from_B(space, B);
            // Planar partner of the member with y-semi-axis B and foci (0, +-a).
            const double A2 = (B * B - a * a) / k, B2 = B * B;
            for (const auto& p : sample_conic_chart(conic, 200)) {
                const Eigen::Vector3d q = oracle::lift(s, p);
                const Eigen::Vector2d pp = oracle::down(q);
                worst_implicit = std::max(worst_implicit, std::abs(pp.x() * pp.x() / A2 + pp.y() * pp.y() / B2 - 1.0));

                const Eigen::Vector3d cone(2 * q.x() / A2, 2 * q.y() / B2, -2 * q.z());
                Eigen::Vector3d n = oracle::tangent(s, q, oracle::raise(s, cone));
                n /= std::sqrt(oracle::dot3(s, n, n));
                const Eigen::Vector2d gp(2 * pp.x() / A2, 2 * pp.y() / B2);
                const Eigen::Vector2d np(gp.x(), k * gp.y());
                const Eigen::Vector2d u = oracle::push(q, n);
                const Eigen::Vector2d perp = u - oracle::dot2(k, u, np) / oracle::dot2(k, np, np) * np;
                const double along = std::abs(oracle::dot2(k, u, np)) / std::sqrt(oracle::dot2(k, np, np));
                worst_angle = std::max(worst_angle, std::atan2(std::sqrt(oracle::dot2(k, perp, perp)), along));

                const Eigen::Vector3d v = oracle::tangent(s, q, Eigen::Vector3d(g(rng), g(rng), g(rng)));
                const Eigen::Vector3d v_ref = v - 2.0 * oracle::dot3(s, v, n) * n;
                const Eigen::Vector2d w = oracle::push(q, v);
                const Eigen::Vector2d w_ref = w - 2.0 * oracle::dot2(k, w, np) / oracle::dot2(k, np, np) * np;
                worst_commute = std::max(worst_commute, (oracle::push(q, v_ref) - w_ref).norm() / w.norm());
                ++points;
            }
        }
    }
    const bool pass = points == 1200 && worst_implicit < 1e-10 && worst_angle < 1e-8 && worst_commute < 1e-8;
    return {pass, std::to_string(points) + " points, implicit " + fmt("%.2e", worst_implicit) + ", normal angle " +
                      fmt("%.2e", worst_angle) + ", commutation " + fmt("%.2e", worst_commute)};
}

Outcome independence() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> g;
    const LagrangeParams P{0.2, 0.15, -0.1};
    Outcome o;
    double worst_fraction = 1.0, worst_mismatch = 0.0;
    const std::pair<int, double> cases[] = {{+1, 0.3}, {+1, 0.6}, {+1, 1.0}, {-1, 0.3}, {-1, 0.6}};
    for (const auto& [s, a] : cases) {
        const SpaceSpec plane = SpaceSpec::plane(a, s);
        const double R = s > 0 ? 2.0 : 0.95;
        int good = 0;
        const int n = 10000;
        for (int i = 0; i < n;) {
            const Eigen::Vector2d p(R * u(rng), R * u(rng));
            if (p.norm() > R || (p - Eigen::Vector2d(0, a)).norm() < 1e-3 || (p + Eigen::Vector2d(0, a)).norm() < 1e-3) continue;
            const Eigen::Vector2d v(g(rng), g(rng));
            const double d = oracle::det_velocity(s, a, p, v);
            const double lib = independence_check(PlaneState{GnomonicPoint{p}, GnomonicVector{v}, 0.0}, P, plane);
            worst_mismatch = std::max(worst_mismatch, std::abs(d - lib) / std::max(1.0, d));
            if (d > 1e-8) ++good;
            ++i;
        }
        worst_fraction = std::min(worst_fraction, static_cast<double>(good) / n);
    }
    o.pass = worst_fraction >= 0.99 && worst_mismatch < 1e-10;
    o.detail = "min nondegenerate fraction " + fmt("%.4f", worst_fraction) + ", library mismatch " + fmt("%.1e", worst_mismatch);
    return o;
}

Outcome twins() {
    Outcome o;
    for (const char* name : {"lagrange-full-sphere", "lagrange-full-hyperbolic"}) {
        const Scenario s = *find_preset(name);
        SimulationLimits lim = s.limits;
        lim.bounce_max = 20;
        lim.sample_dt = std::min(lim.sample_dt, 0.0025);
        const TwinResult t = twin_simulation(curved_init(s), s.params, s.space, s.wall, lim, s.integrator_options());
        double event_gap = 0.0;
        bool order = t.curved.events.size() == t.plane.events.size();
        for (std::size_t i = 0; order && i < t.curved.events.size(); ++i) {
            event_gap = std::max(event_gap, (oracle::down(t.curved.events[i].pos.coords) - t.plane.events[i].pos.coords).norm());
            order = t.curved.events[i].wall_index == t.plane.events[i].wall_index;
        }
        const bool ok = order && t.curved.events.size() == 20 && !t.comparison.structural_mismatch &&
                        t.comparison.max_distance < 1e-6 && event_gap < 1e-6;
        o.pass = o.pass && ok;
        o.detail += std::string(name) + ": " + std::to_string(t.curved.events.size()) + "/" +
                    std::to_string(t.plane.events.size()) + " events, point sets " + fmt("%.2e", t.comparison.max_distance) +
                    ", event points " + fmt("%.2e", event_gap) + "; ";
    }
    return o;
}

Outcome conformal_orbits() {
    Outcome o;
    const Scenario s = *find_preset("conformal-orbit-correspondence");
    double worst_dev = 0.0, worst_level = 0.0, worst_drift = 0.0;
    for (const OrbitCase& c : s.orbits) {
        const bool sphere = c.pairing != Pairing::HyperbolicHookeKepler;
        const ConformalSystem src{sphere ? ConformalKind::SphericalHooke : ConformalKind::HyperbolicHooke, c.f};
        const OrbitCorrespondence r = verify_orbit_correspondence(c.pairing, src, c.z0, c.w0, c.t_span);
        const double mhat = oracle::hooke_h(sphere, c.f, c.z0, c.w0);
        double level;
        if (c.pairing == Pairing::SphericalHyperbolicHooke)
            level = std::abs(oracle::hooke_h(false, c.f + mhat, c.z0, c.w0) - mhat);
        else
            level = std::abs(oracle::kepler_h(2 * mhat, c.z0 * c.z0, c.w0 / std::conj(c.z0)) -
                             (-(4 * c.f + (sphere ? 2 : -2) * mhat)));
        double drift = std::max(r.source_shell_drift, r.partner_shell_drift);
        const ConformalOrbit orbit = integrate_conformal(src, c.z0, c.w0, r.t_span);
        for (std::size_t i = 0; i < orbit.t.size(); ++i)
            drift = std::max(drift, std::abs(oracle::hooke_h(sphere, c.f, orbit.z[i], orbit.w[i]) - mhat));
        worst_dev = std::max(worst_dev, r.max_deviation);
        worst_level = std::max(worst_level, level);
        worst_drift = std::max(worst_drift, drift);
    }
    o.pass = s.orbits.size() == 3 && worst_dev < 1e-6 && worst_level < 1e-12 && worst_drift < 1e-9;
    o.detail = std::to_string(s.orbits.size()) + " pairings, deviation " + fmt("%.2e", worst_dev) + ", level " +
               fmt("%.1e", worst_level) + ", drift " + fmt("%.2e", worst_drift);
    return o;
}

Outcome confocal_images() {
    const Scenario s = *find_preset("conformal-confocal-image");
    const ImageGrid& grid = s.image;
    double worst_res = 0.0, worst_foci = 0.0;
    bool g1 = true;
    int members = 0;
    for (double a : grid.a_values) {
        std::vector<double> Bs;
        for (double d : grid.ellipse_offsets) Bs.push_back(a + d);
        for (double B : grid.ellipse_values)
            if (B > a) Bs.push_back(B);
        for (double fr : grid.hyperbola_fractions) Bs.push_back(fr * a);
        for (double B : Bs) {
            const ConfocalImageReport r = confocal_image_check(a, B, grid.samples);
            worst_res = std::max({worst_res, r.sphere_residual, r.factor_residual});
            worst_foci = std::max(worst_foci, std::abs(r.measured_c - 2 * std::sqrt(a) / (1 - a)));
            if (B > a) g1 = g1 && r.g1_empty;
            ++members;
        }
    }
    return {worst_res < 1e-8 && worst_foci < 1e-8 && g1 && members > 0,
            std::to_string(members) + " members, residual " + fmt("%.2e", worst_res) + ", foci " + fmt("%.2e", worst_foci) +
                (g1 ? ", G1 empty" : ", G1 has points")};
}

Outcome reflection_law() {
    double worst_kin = 0.0, worst_tan = 0.0;
    std::size_t events = 0;
    for (const Scenario& s : billiard_presets()) {
        const RunResult r = run_scenario(s);
        if (r.plane) {
            const double k = s.space.norm_factor();
            for (const auto& ev : r.plane->events) {
                const ConicSpec& m = s.wall.members[ev.wall_index];
                const Eigen::Vector2d d = ev.pos.coords - m.center;
                const Eigen::Vector2d t(-d.y() / m.B2, d.x() / m.A2);
                const Eigen::Vector2d &a = ev.v_in.comps, &b = ev.v_out.comps;
                worst_kin = std::max(worst_kin, 0.5 * std::abs(oracle::dot2(k, b, b) - oracle::dot2(k, a, a)));
                worst_tan = std::max(worst_tan, std::abs(oracle::dot2(k, b - a, t)) / std::sqrt(oracle::dot2(k, t, t)));
                ++events;
            }
        }
        if (r.curved) {
            const int sg = s.space.sign();
            for (const auto& ev : r.curved->events) {
                const ConicSpec& m = s.wall.members[ev.wall_index];
                const Eigen::Vector3d& q = ev.pos.coords;
                const Eigen::Vector3d cone(q.x() / m.A2, q.y() / m.B2, -q.z());
                const Eigen::Vector3d t = cone.cross(Eigen::Vector3d(q.x(), q.y(), sg * q.z()));
                const Eigen::Vector3d &a = ev.v_in.comps, &b = ev.v_out.comps;
                worst_kin = std::max(worst_kin, 0.5 * std::abs(oracle::dot3(sg, b, b) - oracle::dot3(sg, a, a)));
                worst_tan = std::max(worst_tan, std::abs(oracle::dot3(sg, b - a, t)) / std::sqrt(oracle::dot3(sg, t, t)));
                ++events;
            }
        }
    }
    return {events > 0 && worst_kin < 1e-12 && worst_tan < 1e-10,
            std::to_string(events) + " events, kinetic " + fmt("%.2e", worst_kin) + ", tangential " + fmt("%.2e", worst_tan)};
}

void run(int id, const char* title, const std::function<Outcome()>& body, double time_limit = 0.0) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    while (o.detail.size() >= 2 && o.detail.compare(o.detail.size() - 2, 2, "; ") == 0) o.detail.resize(o.detail.size() - 2);
    if (time_limit > 0.0 && secs >= time_limit) {
        o.pass = false;
        o.detail += ", over the time limit";
    }
    report(id, title, o, secs);
}

}  // namespace

int main() {
    run(1, "projective force correspondence", force_correspondence, 5.0);
    run(2, "partner integral along confocal billiards", partner_integral);
    run(3, "wall correspondence", wall_correspondence);
    run(4, "independence of the two integrals", independence);
    run(5, "twin simulations", twins);
    run(6, "conformal orbit correspondence", conformal_orbits);
    run(7, "confocal image under the square map", confocal_images);
    run(8, "reflection law", reflection_law);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
