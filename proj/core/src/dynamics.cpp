#include "billiards/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "billiards/errors.hpp"

namespace billiards {

IntegratorOptions IntegratorOptions::defaults() {
    IntegratorOptions o;
    if (const char* env = std::getenv("BILLIARDS_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0 && std::isfinite(v)) o.rtol = o.atol = v;
    }
    return o;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::TimeLimit: return "TimeLimit";
        case Termination::BounceLimit: return "BounceLimit";
        case Termination::Collision: return "Collision";
        case Termination::SingularSet: return "SingularSet";
        case Termination::DomainExit: return "DomainExit";
        case Termination::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

namespace {

constexpr double kCrossTol = 1e-12;
constexpr double kCornerTol = 1e-10;
constexpr double kGrazing = 1e-8;
constexpr double kEquatorGuard = 1e-9;
constexpr int kMaxRootIterations = 200;

template <Chart C>
struct Sys;

template <>
struct Sys<Chart::Gnomonic> {
    static constexpr std::size_t N = 4;
    using Y = OdeVec<N>;
    using V = Eigen::Vector2d;

    static Y pack(const PlaneState& s) { return {s.pos.coords.x(), s.pos.coords.y(), s.vel.comps.x(), s.vel.comps.y()}; }
    static PlaneState unpack(const Y& y, double t, const SpaceSpec&) {
        return PlaneState{GnomonicPoint{V(y[0], y[1])}, GnomonicVector{V(y[2], y[3])}, t};
    }
    static void rhs(const LagrangeParams& params, const SpaceSpec& space, const Y& y, Y& dy) {
        const V F = force_plane(V(y[0], y[1]), params, space);
        dy = {y[2], y[3], F.x(), F.y()};
    }
    static V chart(const GnomonicPoint& p) { return p.coords; }
    static EnergyPair energies(const PlaneState& s, const LagrangeParams& params, const SpaceSpec& space) {
        return energy_pair(s.pos, s.vel, params, space);
    }
    static double speed2(const V& v, const SpaceSpec& space) { return affine_dot(v, v, space); }
    static double dot(const V& u, const V& v, const SpaceSpec& space) { return affine_dot(u, v, space); }
    static std::optional<Termination> domain(const PlaneState& s, const LagrangeParams&, const SpaceSpec& space) {
        if (space.partner_sign < 0 && 1.0 - s.pos.coords.squaredNorm() < kCrossTol) return Termination::DomainExit;
        return std::nullopt;
    }
    static double center_distance(const PlaneState& s, const LagrangeParams& params, const SpaceSpec& space) {
        const auto c = chart_centers(space);
        double d = std::numeric_limits<double>::infinity();
        if (params.m1 != 0.0) d = std::min(d, affine_norm(s.pos.coords - c[0], space));
        if (params.m2 != 0.0) d = std::min(d, affine_norm(s.pos.coords - c[1], space));
        return d;
    }
};

template <>
struct Sys<Chart::Ambient3> {
    static constexpr std::size_t N = 6;
    using Y = OdeVec<N>;
    using V = Eigen::Vector3d;

    static Y pack(const CurvedState& s) {
        const V& q = s.pos.coords;
        const V& v = s.vel.comps;
        return {q.x(), q.y(), q.z(), v.x(), v.y(), v.z()};
    }
    // Re-projects onto the manifold and its tangent space.
    static CurvedState unpack(const Y& y, double t, const SpaceSpec& space) {
        const AmbientPoint q = project_to_manifold(V(y[0], y[1], y[2]), space);
        return CurvedState{q, tangent_project(q, V(y[3], y[4], y[5]), space), t};
    }
    static void rhs(const LagrangeParams& params, const SpaceSpec& space, const Y& y, Y& dy) {
        const V q(y[0], y[1], y[2]);
        const V v(y[3], y[4], y[5]);
        const V F = force_curved(AmbientPoint{q}, params, space).comps;
        const V acc = space.kind == SpaceKind::SphereSouth ? V(F - v.squaredNorm() * q) : V(F + minkowski_dot(v, v) * q);
        dy = {v.x(), v.y(), v.z(), acc.x(), acc.y(), acc.z()};
    }
    static Eigen::Vector2d chart(const AmbientPoint& q) {
        return Eigen::Vector2d(-q.coords.x() / q.coords.z(), -q.coords.y() / q.coords.z());
    }
    static EnergyPair energies(const CurvedState& s, const LagrangeParams& params, const SpaceSpec& space) {
        return energy_pair(s.pos, s.vel, params, space);
    }
    static double speed2(const V& v, const SpaceSpec& space) { return ambient_dot(v, v, space); }
    static double dot(const V& u, const V& v, const SpaceSpec& space) { return ambient_dot(u, v, space); }
    static std::optional<Termination> domain(const CurvedState& s, const LagrangeParams& params,
                                             const SpaceSpec& space) {
        const double z = s.pos.coords.z();
        if (space.kind == SpaceKind::SphereSouth) {
            if (z >= -kEquatorGuard) return params.f != 0.0 ? Termination::SingularSet : Termination::DomainExit;
        } else if (1.0 / (z * z) < kCrossTol) {
            return Termination::DomainExit;
        }
        return std::nullopt;
    }
    static double center_distance(const CurvedState& s, const LagrangeParams& params, const SpaceSpec& space) {
        const auto c = ambient_centers(space);
        double d = std::numeric_limits<double>::infinity();
        if (params.m1 != 0.0) d = std::min(d, (s.pos.coords - c[0]).norm());
        if (params.m2 != 0.0) d = std::min(d, (s.pos.coords - c[1]).norm());
        return d;
    }
};

template <Chart C>
StepResult<C> adaptive_step(const State<C>& s, const LagrangeParams& params, const SpaceSpec& space, double h,
                            const IntegratorOptions& opt, bool* rejected_out = nullptr) {
    using S = Sys<C>;
    auto rhs = [&](double, const typename S::Y& y, typename S::Y& dy) { S::rhs(params, space, y, dy); };
    const auto y0 = S::pack(s);
    typename S::Y f0;
    rhs(s.t, y0, f0);
    bool rejected = false;
    while (true) {
        if (!(h >= opt.h_min)) throw NumericalError("step size underflow at t = " + std::to_string(s.t));
        const auto trial = dop853_trial<S::N>(rhs, s.t, y0, f0, h, opt);
        if (trial.error_norm < 1.0) {
            for (double v : trial.y)
                if (!std::isfinite(v)) throw NumericalError("non-finite state after step");
            if (rejected_out) *rejected_out = rejected;
            return StepResult<C>{S::unpack(trial.y, s.t + h, space), h, h * dop853_factor(trial.error_norm, rejected)};
        }
        h *= dop853_factor(trial.error_norm, false);
        rejected = true;
    }
}

template <Chart C>
State<C> fixed_step_impl(const State<C>& s, const LagrangeParams& params, const SpaceSpec& space, double h) {
    using S = Sys<C>;
    if (h == 0.0) return s;
    auto rhs = [&](double, const typename S::Y& y, typename S::Y& dy) { S::rhs(params, space, y, dy); };
    const auto y0 = S::pack(s);
    typename S::Y f0;
    rhs(s.t, y0, f0);
    IntegratorOptions opt;
    const auto trial = dop853_trial<S::N>(rhs, s.t, y0, f0, h, opt);
    return S::unpack(trial.y, s.t + h, space);
}

template <Chart C>
double member_value(const ConicSpec& m, const State<C>& s) {
    return implicit_eval(m, s.pos.coords);
}

// Side of the wall member the state is on; on the wall, the side it is moving into.
template <Chart C>
int side_of(const ConicSpec& m, const State<C>& s) {
    const double v = member_value(m, s);
    if (std::abs(v) >= kCornerTol) return v > 0.0 ? 1 : -1;
    const double rate = implicit_gradient(m, s.pos.coords).dot(s.vel.comps);
    return rate >= 0.0 ? 1 : -1;
}

// Cubic Hermite interpolation of the position over the step, used only for a first guess.
template <Chart C>
typename Sys<C>::V hermite(const State<C>& a, const State<C>& b, double th) {
    const double h = b.t - a.t;
    const double t2 = th * th, t3 = t2 * th;
    return (2 * t3 - 3 * t2 + 1) * a.pos.coords + (t3 - 2 * t2 + th) * h * a.vel.comps +
           (-2 * t3 + 3 * t2) * b.pos.coords + (t3 - t2) * h * b.vel.comps;
}

// Crossing of member m inside the accepted step a -> b, starting on side `side`.
template <Chart C>
Crossing<C> locate_member(const State<C>& a, const State<C>& b, const ConicSpec& m, int member, int side,
                          const LagrangeParams& params, const SpaceSpec& space) {
    const double H = b.t - a.t;
    // Initial guess from the Hermite interpolant.
    double tlo = 0.0, thi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (tlo + thi);
        const double v = implicit_eval(m, hermite(a, b, mid));
        (side * v > 0.0 ? tlo : thi) = mid;
    }
    double lo = 0.0, hi = H;
    double glo = side * std::max(std::abs(member_value(m, a)), 1e-300);
    double ghi = member_value(m, b);
    double x = std::clamp(0.5 * (tlo + thi), 1e-6, 1.0 - 1e-6) * H;
    int retained = 0;
    State<C> best = b;
    double best_g = ghi;
    for (int it = 1; it <= kMaxRootIterations; ++it) {
        const State<C> sx = fixed_step_impl(a, params, space, x);
        const double g = member_value(m, sx);
        if (std::abs(g) < std::abs(best_g)) {
            best = sx;
            best_g = g;
        }
        if (std::abs(g) < kCrossTol) return Crossing<C>{sx, member, it};
        if (side * g > 0.0) {
            lo = x;
            glo = g;
            if (retained == 1) ghi *= 0.5;
            retained = 1;
        } else {
            hi = x;
            ghi = g;
            if (retained == -1) glo *= 0.5;
            retained = -1;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a.t) + H)) break;
        x = lo - glo * (hi - lo) / (ghi - glo);
        if (!(x > lo && x < hi) || (it % 4 == 0)) x = 0.5 * (lo + hi);
    }
    if (std::abs(best_g) < kCornerTol) return Crossing<C>{best, member, kMaxRootIterations};
    throw NumericalError("crossing location did not converge (|F| = " + std::to_string(std::abs(best_g)) + ")");
}

template <Chart C>
State<C> reflect_impl(const State<C>& s, const ConicSpec& member, const SpaceSpec& space, Reflected* info,
                      typename Sys<C>::V* normal_out = nullptr) {
    using S = Sys<C>;
    const typename S::V n = normal_at(member, s.pos.coords);
    const typename S::V& v = s.vel.comps;
    const double k2 = S::dot(v, n, space);
    const double speed = std::sqrt(S::speed2(v, space));
    if (info) info->grazing = speed > 0.0 && std::abs(k2) / speed < kGrazing;
    if (normal_out) *normal_out = n;
    State<C> out = s;
    out.vel.comps = v - 2.0 * k2 * n;
    return out;
}

template <Chart C>
std::optional<Crossing<C>> locate_public(const State<C>& a, const State<C>& b, const WallSet& wall,
                                         const LagrangeParams& params, const SpaceSpec& space) {
    std::optional<Crossing<C>> first;
    for (std::size_t i = 0; i < wall.members.size(); ++i) {
        const auto& m = wall.members[i];
        const int side = side_of(m, a);
        const double vb = member_value(m, b);
        if (!(side * vb < 0.0)) continue;
        auto c = locate_member(a, b, m, static_cast<int>(i), side, params, space);
        if (!first || c.state.t < first->state.t) first = c;
    }
    return first;
}

template <Chart C>
Termination classify_domain(const SpaceSpec& space, const LagrangeParams& params) {
    return space.kind == SpaceKind::SphereSouth && params.f != 0.0 ? Termination::SingularSet : Termination::DomainExit;
}

template <Chart C>
TrajectoryRecord<C> run(const State<C>& init, const LagrangeParams& params, const SpaceSpec& space,
                        const WallSet& wall, const SimulationLimits& limits, const IntegratorOptions& opt) {
    using S = Sys<C>;
    wall.validate();
    if (!(wall.space() == space)) throw DomainError("wall and simulation live in different spaces");
    if (!(limits.sample_dt > 0.0) || !(limits.t_max > 0.0)) throw DomainError("sample_dt and t_max must be positive");

    TrajectoryRecord<C> rec;
    rec.space = space;
    rec.params = params;
    auto finish = [&](Termination t, std::string detail) {
        rec.termination = t;
        rec.detail = std::move(detail);
        return rec;
    };

    State<C> cur = init;
    try {
        if (auto term = S::domain(cur, params, space)) return finish(*term, "initial state outside the domain");
        rec.samples.push_back({cur, S::energies(cur, params, space)});
    } catch (const SingularityError& e) {
        return finish(e.center() < 2 ? Termination::Collision : Termination::SingularSet, e.what());
    } catch (const DomainError& e) {
        return finish(classify_domain<C>(space, params), e.what());
    }

    std::vector<int> sides;
    for (const auto& m : wall.members) sides.push_back(side_of(m, cur));

    const double t_end = init.t + limits.t_max;
    long sample_index = 1;
    double next_sample = init.t + limits.sample_dt;
    double h = std::min(limits.sample_dt, 0.01);
    if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
    int bounces = 0;

    while (true) {
        if (cur.t >= t_end) return finish(Termination::TimeLimit, "");
        const double target = std::min(next_sample, t_end);
        const double remaining = target - cur.t;
        if (remaining <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(target))) {
            // A reflection landed just short of the sample time.
            cur.t = target;
            if (cur.t > rec.samples.back().state.t) rec.samples.push_back({cur, S::energies(cur, params, space)});
            if (target == next_sample) next_sample = init.t + limits.sample_dt * static_cast<double>(++sample_index);
            continue;
        }
        const bool clamped = h >= remaining;
        const double h_try = clamped ? remaining : h;

        StepResult<C> res;
        bool rejected = false;
        try {
            res = adaptive_step(cur, params, space, h_try, opt, &rejected);
        } catch (const SingularityError& e) {
            return finish(e.center() < 2 ? Termination::Collision : Termination::SingularSet, e.what());
        } catch (const DomainError& e) {
            return finish(classify_domain<C>(space, params), e.what());
        } catch (const NumericalError& e) {
            if (S::center_distance(cur, params, space) < 1e-4) return finish(Termination::Collision, e.what());
            return finish(Termination::NumericalFailure, e.what());
        }
        State<C> next = res.state;
        const bool hit_target = clamped && res.h_used == h_try;
        if (hit_target) next.t = target;

        // Candidate members that changed side during the step, earliest first.
        std::vector<Crossing<C>> hits;
        try {
            for (std::size_t i = 0; i < wall.members.size(); ++i) {
                const double vb = member_value(wall.members[i], next);
                if (sides[i] * vb < 0.0)
                    hits.push_back(locate_member(cur, next, wall.members[i], static_cast<int>(i), sides[i], params, space));
            }
        } catch (const NumericalError& e) {
            return finish(Termination::NumericalFailure, e.what());
        } catch (const SingularityError& e) {
            return finish(e.center() < 2 ? Termination::Collision : Termination::SingularSet, e.what());
        } catch (const DomainError& e) {
            return finish(classify_domain<C>(space, params), e.what());
        }
        std::sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) { return x.state.t < y.state.t; });

        const Crossing<C>* active = nullptr;
        for (const auto& c : hits) {
            if (member_active(wall.members[c.member], S::chart(c.state.pos))) {
                active = &c;
                break;
            }
            sides[c.member] = -sides[c.member];
        }

        if (active) {
            const State<C>& at = active->state;
            int member = active->member;
            bool corner = false;
            // Wall-member intersection: reflect off the member met most head-on.
            double best_k2 = -1.0;
            for (std::size_t j = 0; j < wall.members.size(); ++j) {
                const auto& m = wall.members[j];
                if (!member_active(m, S::chart(at.pos)) || std::abs(member_value(m, at)) >= kCornerTol) continue;
                const double k2 = std::abs(S::dot(at.vel.comps, normal_at(m, at.pos.coords), space));
                if (static_cast<int>(j) != active->member) corner = true;
                if (k2 > best_k2) {
                    best_k2 = k2;
                    member = static_cast<int>(j);
                }
            }
            ReflectionEvent<C> ev;
            Reflected info;
            typename S::V normal;
            State<C> post;
            try {
                post = reflect_impl(at, wall.members[member], space, &info, &normal);
                ev.before = S::energies(at, params, space);
                ev.after = S::energies(post, params, space);
            } catch (const DomainError& e) {
                return finish(Termination::NumericalFailure, e.what());
            } catch (const SingularityError& e) {
                return finish(Termination::Collision, e.what());
            }
            ev.t = at.t;
            ev.pos = at.pos;
            ev.v_in = at.vel;
            ev.v_out = post.vel;
            ev.normal.comps = normal;
            ev.wall_index = member;
            ev.grazing = info.grazing;
            ev.corner = corner;
            rec.events.push_back(ev);
            if (post.t > rec.samples.back().state.t) rec.samples.push_back({post, ev.after});
            cur = post;
            while (next_sample <= cur.t) next_sample = init.t + limits.sample_dt * static_cast<double>(++sample_index);
            if (++bounces >= limits.bounce_max) return finish(Termination::BounceLimit, "");
            h = std::max(res.h_used, opt.h_min);
            continue;
        }

        if (auto term = S::domain(next, params, space)) return finish(*term, "left the simulation domain");
        cur = next;
        if (hit_target) {
            try {
                rec.samples.push_back({cur, S::energies(cur, params, space)});
            } catch (const SingularityError& e) {
                return finish(e.center() < 2 ? Termination::Collision : Termination::SingularSet, e.what());
            } catch (const DomainError& e) {
                return finish(classify_domain<C>(space, params), e.what());
            }
            if (target == next_sample) next_sample = init.t + limits.sample_dt * static_cast<double>(++sample_index);
        }
        h = (clamped && !rejected) ? std::max(h, res.h_next) : res.h_next;
        if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
    }
}

}  // namespace

StepResult<Chart::Gnomonic> step(const PlaneState& s, const LagrangeParams& params, const SpaceSpec& space, double h,
                                 const IntegratorOptions& opt) {
    return adaptive_step(s, params, space, h, opt);
}

StepResult<Chart::Ambient3> step(const CurvedState& s, const LagrangeParams& params, const SpaceSpec& space, double h,
                                 const IntegratorOptions& opt) {
    return adaptive_step(s, params, space, h, opt);
}

PlaneState fixed_step(const PlaneState& s, const LagrangeParams& params, const SpaceSpec& space, double h) {
    return fixed_step_impl(s, params, space, h);
}

CurvedState fixed_step(const CurvedState& s, const LagrangeParams& params, const SpaceSpec& space, double h) {
    return fixed_step_impl(s, params, space, h);
}

std::optional<Crossing<Chart::Gnomonic>> locate_crossing(const PlaneState& a, const PlaneState& b,
                                                         const WallSet& wall, const LagrangeParams& params,
                                                         const SpaceSpec& space) {
    return locate_public(a, b, wall, params, space);
}

std::optional<Crossing<Chart::Ambient3>> locate_crossing(const CurvedState& a, const CurvedState& b,
                                                         const WallSet& wall, const LagrangeParams& params,
                                                         const SpaceSpec& space) {
    return locate_public(a, b, wall, params, space);
}

PlaneState reflect(const PlaneState& on_wall, const ConicSpec& member, const SpaceSpec& space, Reflected* info) {
    return reflect_impl(on_wall, member, space, info);
}

CurvedState reflect(const CurvedState& on_wall, const ConicSpec& member, const SpaceSpec& space, Reflected* info) {
    return reflect_impl(on_wall, member, space, info);
}

PlaneRecord simulate(const PlaneState& init, const LagrangeParams& params, const SpaceSpec& space,
                     const WallSet& wall, const SimulationLimits& limits, const IntegratorOptions& opt) {
    if (space.curved()) throw DomainError("planar simulation requires a planar space");
    return run(init, params, space, wall, limits, opt);
}

CurvedRecord simulate(const CurvedState& init, const LagrangeParams& params, const SpaceSpec& space,
                      const WallSet& wall, const SimulationLimits& limits, const IntegratorOptions& opt) {
    if (!space.curved()) throw DomainError("ambient simulation requires a curved space");
    return run(init, params, space, wall, limits, opt);
}

}  // namespace billiards
