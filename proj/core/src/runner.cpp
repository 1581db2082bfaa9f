#include "billiards/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "billiards/errors.hpp"

namespace billiards {

namespace {

double dot(const Eigen::Vector2d& u, const Eigen::Vector2d& v, const SpaceSpec& space) {
    return affine_dot(u, v, space);
}
double dot(const Eigen::Vector3d& u, const Eigen::Vector3d& v, const SpaceSpec& space) {
    return ambient_dot(u, v, space);
}

// Energies in time order, with the values on both sides of every reflection.
template <Chart C>
std::vector<EnergyPair> energy_sequence(const TrajectoryRecord<C>& rec) {
    std::vector<EnergyPair> seq;
    std::size_t e = 0;
    for (const auto& s : rec.samples) {
        while (e < rec.events.size() && rec.events[e].t < s.state.t) {
            seq.push_back(rec.events[e].before);
            seq.push_back(rec.events[e].after);
            ++e;
        }
        seq.push_back(s.energies);
    }
    for (; e < rec.events.size(); ++e) {
        seq.push_back(rec.events[e].before);
        seq.push_back(rec.events[e].after);
    }
    return seq;
}

// Cadence of the twin runs; coarser samples make the Hermite comparison curves the error floor.
constexpr double kTwinSampleDt = 0.0025;

constexpr double kInf = std::numeric_limits<double>::infinity();

void add_check(Report& rep, const CheckSpec& spec, double value, std::string note = {}) {
    const CheckInfo& info = check_info(spec.name);
    rep.add({spec.name, value, spec.threshold, info.mode, spec.expect_fail, std::move(note)});
}

template <Chart C>
void billiard_checks(RunResult& r, const TrajectoryRecord<C>& rec) {
    for (const auto& c : r.scenario.checks) {
        if (c.name == "native_energy_drift") add_check(r.report, c, native_energy_drift(rec));
        else if (c.name == "partner_energy_variation") add_check(r.report, c, partner_energy_variation(rec));
        else if (c.name == "partner_jump_first_reflection") add_check(r.report, c, partner_jump_first_reflection(rec));
        else if (c.name == "reflection_kinetic_energy") add_check(r.report, c, reflection_kinetic_jump(rec));
        else if (c.name == "reflection_tangential") add_check(r.report, c, reflection_tangential_defect(rec));
        else if (c.name == "bounce_count") add_check(r.report, c, static_cast<double>(rec.events.size()));
        else if (c.name == "twin_correspondence") {
            if (!r.twin) {
                add_check(r.report, c, kInf, "partner run unavailable");
            } else if (r.twin->structural_mismatch) {
                add_check(r.report, c, kInf, r.twin->detail);
            } else {
                add_check(r.report, c, r.twin->max_distance,
                          std::to_string(r.twin->segments) + " segments compared");
            }
        }
    }
    r.report.note("termination", to_string(rec.termination));
    if (!rec.detail.empty()) r.report.note("detail", rec.detail);
    r.report.note("bounces", std::to_string(rec.events.size()));
    r.report.note("samples", std::to_string(rec.samples.size()));
    if (rec.termination == Termination::NumericalFailure) {
        r.numerical_failure = true;
        r.diagnostic = rec.detail;
    }
}

SimulationLimits twin_limits(SimulationLimits l) {
    l.sample_dt = std::min(l.sample_dt, kTwinSampleDt);
    return l;
}

bool wants(const Scenario& s, const char* check) {
    return std::any_of(s.checks.begin(), s.checks.end(), [&](const CheckSpec& c) { return c.name == check; });
}

void run_billiard(RunResult& r) {
    const Scenario& s = r.scenario;
    const IntegratorOptions opt = s.integrator_options();
    const bool twin = wants(s, "twin_correspondence");
    if (twin && !s.wall.confocal()) throw ConfigError("twin_correspondence needs a confocal wall");
    if (s.space.curved()) {
        const CurvedState init = curved_init(s);
        r.curved = simulate(init, s.params, s.space, s.wall, s.limits, opt);
        if (twin) {
            TwinResult t = twin_simulation(init, s.params, s.space, s.wall, twin_limits(s.limits), opt);
            r.twin = t.comparison;
            if (t.plane.termination == Termination::NumericalFailure) r.twin->structural_mismatch = true;
        }
        billiard_checks(r, *r.curved);
    } else {
        const PlaneState init = plane_init(s);
        r.plane = simulate(init, s.params, s.space, s.wall, s.limits, opt);
        if (twin) {
            WallSet up;
            for (const auto& m : s.wall.members) up.members.push_back(project_conic(m, Direction::Up));
            const SpaceSpec curved = s.space.partner();
            TwinResult t = twin_simulation(partner_state(init, s.space), partner_params(s.params, s.space), curved, up,
                                           twin_limits(s.limits), opt);
            r.twin = t.comparison;
            if (t.curved.termination == Termination::NumericalFailure) r.twin->structural_mismatch = true;
        }
        billiard_checks(r, *r.plane);
    }
}

ConformalKind source_kind(Pairing p) {
    return p == Pairing::HyperbolicHookeKepler ? ConformalKind::HyperbolicHooke : ConformalKind::SphericalHooke;
}

void run_orbits(RunResult& r) {
    const Scenario& s = r.scenario;
    ConformalOptions opt;
    if (s.tolerance) opt.rtol = opt.atol = *s.tolerance;
    double dev = 0.0, defect = 0.0, drift = 0.0;
    for (const auto& o : s.orbits) {
        OrbitCorrespondence c =
            verify_orbit_correspondence(o.pairing, ConformalSystem{source_kind(o.pairing), o.f}, o.z0, o.w0, o.t_span, opt);
        dev = std::max(dev, c.max_deviation);
        defect = std::max(defect, c.level_defect);
        drift = std::max({drift, c.source_shell_drift, c.partner_shell_drift});
        r.orbits.push_back(c);
    }
    for (const auto& c : s.checks) {
        if (c.name == "orbit_deviation") add_check(r.report, c, dev);
        else if (c.name == "level_defect") add_check(r.report, c, defect);
        else if (c.name == "shell_drift") add_check(r.report, c, drift);
    }
    r.report.note("orbits", std::to_string(s.orbits.size()));
}

void run_images(RunResult& r) {
    const ImageGrid& g = r.scenario.image;
    double sphere = 0.0, factor = 0.0, foci = 0.0, spread = 0.0, nonempty = 0.0;
    for (double a : g.a_values) {
        std::vector<double> Bs;
        for (double d : g.ellipse_offsets) Bs.push_back(a + d);
        for (double B : g.ellipse_values)
            if (B > a) Bs.push_back(B);
        for (double fr : g.hyperbola_fractions) Bs.push_back(a * fr);
        double lo = kInf, hi = -kInf;
        for (double B : Bs) {
            ConfocalImageReport rep = confocal_image_check(a, B, g.samples);
            sphere = std::max(sphere, rep.sphere_residual);
            factor = std::max(factor, rep.factor_residual);
            foci = std::max(foci, std::abs(rep.measured_c - rep.expected_c));
            if (B > a && !rep.g1_empty) nonempty += 1.0;
            lo = std::min(lo, rep.measured_c);
            hi = std::max(hi, rep.measured_c);
            r.images.push_back(rep);
        }
        if (!Bs.empty()) spread = std::max(spread, hi - lo);
    }
    for (const auto& c : r.scenario.checks) {
        if (c.name == "sphere_residual") add_check(r.report, c, sphere);
        else if (c.name == "factor_residual") add_check(r.report, c, factor);
        else if (c.name == "foci_error") add_check(r.report, c, foci);
        else if (c.name == "family_spread") add_check(r.report, c, spread);
        else if (c.name == "g1_nonempty_ellipses") add_check(r.report, c, nonempty);
    }
    r.report.note("members", std::to_string(r.images.size()));
}

}  // namespace

template <Chart C>
double native_energy_drift(const TrajectoryRecord<C>& rec) {
    const auto seq = energy_sequence(rec);
    double d = 0.0;
    for (const auto& e : seq) d = std::max(d, std::abs(e.e_native - seq.front().e_native));
    return d;
}

template <Chart C>
double partner_energy_variation(const TrajectoryRecord<C>& rec) {
    const auto seq = energy_sequence(rec);
    double tv = 0.0;
    for (std::size_t i = 1; i < seq.size(); ++i) tv += std::abs(seq[i].e_partner - seq[i - 1].e_partner);
    return tv;
}

template <Chart C>
double partner_jump_first_reflection(const TrajectoryRecord<C>& rec) {
    if (rec.events.empty()) return 0.0;
    return std::abs(rec.events.front().after.e_partner - rec.events.front().before.e_partner);
}

template <Chart C>
double reflection_kinetic_jump(const TrajectoryRecord<C>& rec) {
    double m = 0.0;
    for (const auto& e : rec.events) {
        const double kin = 0.5 * dot(e.v_in.comps, e.v_in.comps, rec.space);
        const double kout = 0.5 * dot(e.v_out.comps, e.v_out.comps, rec.space);
        m = std::max(m, std::abs(kout - kin));
    }
    return m;
}

template <Chart C>
double reflection_tangential_defect(const TrajectoryRecord<C>& rec) {
    double m = 0.0;
    for (const auto& e : rec.events) {
        const auto& n = e.normal.comps;
        const auto tin = e.v_in.comps - dot(e.v_in.comps, n, rec.space) * n;
        const auto tout = e.v_out.comps - dot(e.v_out.comps, n, rec.space) * n;
        const auto d = (tout - tin).eval();
        m = std::max(m, std::sqrt(std::abs(dot(d, d, rec.space))));
    }
    return m;
}

template double native_energy_drift(const PlaneRecord&);
template double native_energy_drift(const CurvedRecord&);
template double partner_energy_variation(const PlaneRecord&);
template double partner_energy_variation(const CurvedRecord&);
template double partner_jump_first_reflection(const PlaneRecord&);
template double partner_jump_first_reflection(const CurvedRecord&);
template double reflection_kinetic_jump(const PlaneRecord&);
template double reflection_kinetic_jump(const CurvedRecord&);
template double reflection_tangential_defect(const PlaneRecord&);
template double reflection_tangential_defect(const CurvedRecord&);

RunResult run_scenario(const Scenario& s) {
    RunResult r;
    r.scenario = s;
    r.report.name = s.name;
    r.report.note("kind", to_string(s.kind));
    try {
        switch (s.kind) {
            case ScenarioKind::Billiard: run_billiard(r); break;
            case ScenarioKind::ConformalOrbit: run_orbits(r); break;
            case ScenarioKind::ConformalImage: run_images(r); break;
        }
    } catch (const ConfigError& e) {
        r.config_error = true;
        r.diagnostic = e.what();
    } catch (const DomainError& e) {
        r.config_error = true;
        r.diagnostic = e.what();
    } catch (const std::exception& e) {
        r.numerical_failure = true;
        r.diagnostic = e.what();
    }
    if (!r.diagnostic.empty()) r.report.note("diagnostic", r.diagnostic);
    return r;
}

std::vector<RunResult> run_batch(const std::vector<Scenario>& batch, unsigned max_threads) {
    std::vector<RunResult> out(batch.size());
    unsigned n = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(batch.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < batch.size(); i = next++) out[i] = run_scenario(batch[i]);
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    return out;
}

}  // namespace billiards
