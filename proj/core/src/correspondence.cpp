#include "billiards/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "billiards/curves.hpp"
#include "billiards/errors.hpp"

namespace billiards {

namespace {

// Times of all samples and events of a record in order, mapped through dt_new = rate * dt_old
// with the trapezoidal rule. Returns new times for samples and events.
template <class RateFn, Chart C>
void retime(const TrajectoryRecord<C>& rec, RateFn rate, std::vector<double>& sample_t, std::vector<double>& event_t) {
    sample_t.assign(rec.samples.size(), 0.0);
    event_t.assign(rec.events.size(), 0.0);
    std::size_t i = 0, j = 0;
    bool started = false;
    double prev_old = 0.0, prev_rate = 0.0, acc = 0.0;
    auto visit = [&](double t_old, double r) {
        if (!started) {
            started = true;
            acc = t_old;
        } else {
            acc += (t_old - prev_old) * 0.5 * (prev_rate + r);
        }
        prev_old = t_old;
        prev_rate = r;
        return acc;
    };
    while (i < rec.samples.size() || j < rec.events.size()) {
        const bool take_event = j < rec.events.size() &&
                                (i >= rec.samples.size() || rec.events[j].t <= rec.samples[i].state.t);
        if (take_event) {
            event_t[j] = visit(rec.events[j].t, rate(rec.events[j].pos));
            ++j;
        } else {
            sample_t[i] = visit(rec.samples[i].state.t, rate(rec.samples[i].state.pos));
            ++i;
        }
    }
}

EnergyPair swapped(const EnergyPair& e) { return {e.e_partner, e.e_native}; }

template <Chart C>
struct Polyline {
    std::vector<double> t;
    std::vector<ChartVec<C>> p;
    std::vector<ChartVec<C>> v;
    void add(double ti, const ChartVec<C>& pi, const ChartVec<C>& vi) {
        t.push_back(ti);
        p.push_back(pi);
        v.push_back(vi);
    }
};

template <Chart C>
std::vector<Polyline<C>> split_segments(const TrajectoryRecord<C>& rec) {
    std::vector<Polyline<C>> segs(rec.events.size() + 1);
    std::size_t e = 0;
    for (const auto& s : rec.samples) {
        while (e < rec.events.size() && s.state.t >= rec.events[e].t) ++e;
        if (e > 0 && s.state.t == rec.events[e - 1].t) continue;
        segs[e].add(s.state.t, s.state.pos.coords, s.state.vel.comps);
    }
    for (std::size_t k = 0; k < rec.events.size(); ++k) {
        const auto& ev = rec.events[k];
        segs[k].add(ev.t, ev.pos.coords, ev.v_in.comps);
        auto& next = segs[k + 1];
        next.t.insert(next.t.begin(), ev.t);
        next.p.insert(next.p.begin(), ev.pos.coords);
        next.v.insert(next.v.begin(), ev.v_out.comps);
    }
    // Post-reflection samples were skipped above in favor of the event data; keep nodes ordered.
    for (auto& s : segs) {
        std::vector<std::size_t> idx(s.t.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return s.t[x] < s.t[y]; });
        Polyline<C> sorted;
        for (auto i : idx) sorted.add(s.t[i], s.p[i], s.v[i]);
        s = std::move(sorted);
    }
    return segs;
}

template <Chart C>
PointSetComparison compare_impl(const TrajectoryRecord<C>& A, const TrajectoryRecord<C>& B) {
    PointSetComparison out;
    if (A.events.size() != B.events.size()) {
        out.structural_mismatch = true;
        out.detail = "bounce counts differ: " + std::to_string(A.events.size()) + " vs " + std::to_string(B.events.size());
        return out;
    }
    for (std::size_t k = 0; k < A.events.size(); ++k) {
        if (A.events[k].wall_index != B.events[k].wall_index) {
            out.structural_mismatch = true;
            out.detail = "wall member order differs at reflection " + std::to_string(k);
            return out;
        }
    }
    constexpr int D = C == Chart::Ambient3 ? 3 : 2;
    const auto sa = split_segments(A);
    const auto sb = split_segments(B);
    for (std::size_t k = 0; k < sa.size(); ++k) {
        if (sa[k].t.empty() || sb[k].t.empty()) continue;
        const ArcLengthCurve<D> ca(sa[k].t, sa[k].p, sa[k].v);
        const ArcLengthCurve<D> cb(sb[k].t, sb[k].p, sb[k].v);
        const bool closed = k + 1 < sa.size();
        const double L = std::min(ca.length(), cb.length());
        const int n = std::max<int>(64, 4 * static_cast<int>(ca.size() + cb.size()));
        double d = (ca.front() - cb.front()).norm();
        for (int i = 1; i <= n; ++i) {
            const double s = L * i / n;
            d = std::max(d, (ca.point_at(s) - cb.point_at(s)).norm());
        }
        if (closed) d = std::max(d, (ca.back() - cb.back()).norm());
        out.max_distance = std::max(out.max_distance, d);
        ++out.segments;
    }
    return out;
}

double det_chart(const Eigen::Vector2d& p, const Eigen::Vector2d& v, const SpaceSpec& plane) {
    const double s = plane.formula_sign();
    const double k = plane.norm_factor();
    const double x = p.x(), y = p.y(), vx = v.x(), vy = v.y();
    const double r11 = vx, r12 = vy / k;
    const double r21 = (1.0 + s * y * y) * vx - s * x * y * vy;
    const double r22 = -s * x * y * vx + (1.0 + s * x * x) * vy;
    return std::abs(r11 * r22 - r12 * r21);
}

}  // namespace

PlaneRecord project_trajectory(const CurvedRecord& rec, Direction direction) {
    if (direction != Direction::Down) throw DomainError("a curved record can only be projected Down");
    const SpaceSpec& space = rec.space;
    PlaneRecord out;
    out.space = space.partner();
    out.params = partner_params(rec.params, space);
    out.termination = rec.termination;
    out.detail = rec.detail;
    auto rate_of = [&](const AmbientPoint& q) { return reparametrize_rate(central_project_down(q, space), space); };
    std::vector<double> ts, te;
    retime(rec, rate_of, ts, te);
    auto map_vel = [&](const AmbientPoint& q, const AmbientVector& v) {
        const GnomonicPoint p = central_project_down(q, space);
        return GnomonicVector{pushforward_velocity(q, v, space).comps / reparametrize_rate(p, space)};
    };
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        const auto& s = rec.samples[i];
        out.samples.push_back({PlaneState{central_project_down(s.state.pos, space), map_vel(s.state.pos, s.state.vel), ts[i]},
                               swapped(s.energies)});
    }
    for (std::size_t k = 0; k < rec.events.size(); ++k) {
        const auto& e = rec.events[k];
        ReflectionEvent<Chart::Gnomonic> m;
        m.t = te[k];
        m.pos = central_project_down(e.pos, space);
        m.v_in = map_vel(e.pos, e.v_in);
        m.v_out = map_vel(e.pos, e.v_out);
        const Eigen::Vector2d n = pushforward_velocity(e.pos, e.normal, space).comps;
        m.normal.comps = n / std::sqrt(affine_dot(n, n, out.space));
        m.wall_index = e.wall_index;
        m.before = swapped(e.before);
        m.after = swapped(e.after);
        m.grazing = e.grazing;
        m.corner = e.corner;
        out.events.push_back(m);
    }
    return out;
}

CurvedRecord project_trajectory(const PlaneRecord& rec, Direction direction) {
    if (direction != Direction::Up) throw DomainError("a planar record can only be projected Up");
    const SpaceSpec& space = rec.space;
    CurvedRecord out;
    out.space = space.partner();
    out.params = partner_params(rec.params, space);
    out.termination = rec.termination;
    out.detail = rec.detail;
    auto inv_rate = [&](const GnomonicPoint& p) { return 1.0 / reparametrize_rate(p, space); };
    std::vector<double> ts, te;
    retime(rec, inv_rate, ts, te);
    auto map_vel = [&](const GnomonicPoint& p, const GnomonicVector& v) {
        return AmbientVector{pushforward_velocity(p, v, space).comps * reparametrize_rate(p, space)};
    };
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        const auto& s = rec.samples[i];
        out.samples.push_back({CurvedState{central_lift_up(s.state.pos, space), map_vel(s.state.pos, s.state.vel), ts[i]},
                               swapped(s.energies)});
    }
    for (std::size_t k = 0; k < rec.events.size(); ++k) {
        const auto& e = rec.events[k];
        ReflectionEvent<Chart::Ambient3> m;
        m.t = te[k];
        m.pos = central_lift_up(e.pos, space);
        m.v_in = map_vel(e.pos, e.v_in);
        m.v_out = map_vel(e.pos, e.v_out);
        const Eigen::Vector3d n = pushforward_velocity(e.pos, e.normal, space).comps;
        m.normal.comps = n / std::sqrt(ambient_dot(n, n, out.space));
        m.wall_index = e.wall_index;
        m.before = swapped(e.before);
        m.after = swapped(e.after);
        m.grazing = e.grazing;
        m.corner = e.corner;
        out.events.push_back(m);
    }
    return out;
}

PointSetComparison compare_point_sets(const PlaneRecord& A, const PlaneRecord& B) { return compare_impl(A, B); }
PointSetComparison compare_point_sets(const CurvedRecord& A, const CurvedRecord& B) { return compare_impl(A, B); }

double independence_check(const PlaneState& s, const LagrangeParams&, const SpaceSpec& space) {
    if (space.curved()) throw DomainError("planar state given with a curved space");
    return det_chart(s.pos.coords, s.vel.comps, space);
}

double independence_check(const CurvedState& s, const LagrangeParams&, const SpaceSpec& space) {
    const PlaneState p = partner_state(s, space);
    return det_chart(p.pos.coords, p.vel.comps, space.partner());
}

PlaneState partner_state(const CurvedState& s, const SpaceSpec& space) {
    const GnomonicPoint p = central_project_down(s.pos, space);
    return PlaneState{p, GnomonicVector{pushforward_velocity(s.pos, s.vel, space).comps / reparametrize_rate(p, space)}, s.t};
}

CurvedState partner_state(const PlaneState& s, const SpaceSpec& space) {
    return CurvedState{central_lift_up(s.pos, space),
                       AmbientVector{pushforward_velocity(s.pos, s.vel, space).comps * reparametrize_rate(s.pos, space)},
                       s.t};
}

Eigen::Vector2d projected_acceleration(const CurvedState& s, const LagrangeParams& params, const SpaceSpec& space) {
    const Eigen::Vector3d& q = s.pos.coords;
    const Eigen::Vector3d& v = s.vel.comps;
    const Eigen::Vector3d F = force_curved(s.pos, params, space).comps;
    const Eigen::Vector3d acc =
        space.kind == SpaceKind::SphereSouth ? Eigen::Vector3d(F - v.squaredNorm() * q) : Eigen::Vector3d(F + minkowski_dot(v, v) * q);
    const double z = q.z();
    Eigen::Vector2d p, dp, ddp;
    for (int i = 0; i < 2; ++i) {
        p[i] = -q[i] / z;
        dp[i] = -v[i] / z + q[i] * v.z() / (z * z);
        ddp[i] = -acc[i] / z + 2.0 * v[i] * v.z() / (z * z) + q[i] * acc.z() / (z * z) -
                 2.0 * q[i] * v.z() * v.z() / (z * z * z);
    }
    const double rate = 1.0 + space.sign() * p.squaredNorm();
    const double drate = 2.0 * space.sign() * p.dot(dp);
    return ddp / (rate * rate) - dp * drate / (rate * rate * rate);
}

TwinResult twin_simulation(const CurvedState& init, const LagrangeParams& params, const SpaceSpec& space,
                           const WallSet& wall, const SimulationLimits& limits, const IntegratorOptions& opt) {
    TwinResult out;
    out.curved = simulate(init, params, space, wall, limits, opt);
    const PlaneRecord projected = project_trajectory(out.curved);

    WallSet plane_wall;
    for (const auto& m : wall.members) plane_wall.members.push_back(project_conic(m, Direction::Down));
    SimulationLimits plane_limits = limits;
    plane_limits.t_max = projected.samples.back().state.t - init.t;
    if (out.curved.termination == Termination::BounceLimit) plane_limits.t_max = 2.0 * plane_limits.t_max + 1.0;
    if (!(plane_limits.t_max > 0.0)) {
        out.comparison.structural_mismatch = true;
        out.comparison.detail = std::string("curved run stopped at its start: ") + to_string(out.curved.termination);
        return out;
    }
    out.plane = simulate(partner_state(init, space), partner_params(params, space), space.partner(), plane_wall,
                         plane_limits, opt);
    out.comparison = compare_point_sets(projected, out.plane);
    return out;
}

}  // namespace billiards
