#include "billiards/conics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "billiards/errors.hpp"

namespace billiards {

namespace {

constexpr double kOnCurve = 1e-10;

// Chart-to-manifold rescaling of a cone coefficient: x^2/S is the implicit term on the manifold.
double manifold_coeff(double c, int s) { return c / (1.0 + s * c); }

Eigen::Vector2d chart_of(const Eigen::Vector3d& q) { return Eigen::Vector2d(-q.x() / q.z(), -q.y() / q.z()); }

void require_on_curve(double value) {
    if (!(std::abs(value) < kOnCurve)) throw DomainError("point is not on the conic (|F| >= 1e-10)");
}

}  // namespace

bool ArcRange::contains(double angle) const {
    if (lo <= hi) return angle >= lo && angle <= hi;
    return angle >= lo || angle <= hi;
}

ConicSpec ConicSpec::from_B(const SpaceSpec& space, double B, Branch branch) {
    const double a2 = space.a * space.a;
    if (!(B > 0.0) || std::abs(B * B - a2) < 1e-14) throw DomainError("degenerate confocal conic (B <= 0 or B = |a|)");
    ConicSpec c;
    c.space = space;
    c.A2 = (B * B - a2) / space.norm_factor();
    c.B2 = B * B;
    c.branch = c.family() == ConicFamily::Hyperbola ? branch : Branch::Both;
    if (space.formula_sign() < 0 && !(B < 1.0)) throw DomainError("hyperbolic conic must lie in the Klein disc (B < 1)");
    return c;
}

ConicSpec ConicSpec::from_angles(const SpaceSpec& space, double alpha, double beta) {
    ConicSpec c;
    c.space = space;
    if (space.formula_sign() < 0) {
        c.A2 = std::tanh(alpha) * std::tanh(alpha);
        c.B2 = std::tanh(beta) * std::tanh(beta);
    } else {
        c.A2 = std::tan(alpha) * std::tan(alpha);
        c.B2 = std::tan(beta) * std::tan(beta);
    }
    return c;
}

ConicSpec ConicSpec::offset_circle(const SpaceSpec& plane, const Eigen::Vector2d& center, double radius) {
    if (plane.curved()) throw DomainError("offset conics are only supported on a plane");
    ConicSpec c;
    c.space = plane;
    c.A2 = c.B2 = radius * radius;
    c.center = center;
    return c;
}

double ConicSpec::focal_defect() const {
    const double a2 = space.a * space.a;
    return std::abs(B2 - space.norm_factor() * A2 - a2);
}

void WallSet::validate() const {
    if (members.empty()) throw DomainError("wall set has no members");
    for (const auto& m : members) {
        if (!(m.space == members.front().space)) throw DomainError("wall members live in different spaces");
        if (!(m.B2 > 0.0) || m.A2 == 0.0) throw DomainError("wall member has invalid coefficients");
        if (m.space.curved() && !m.centered()) throw DomainError("offset conics are only supported on a plane");
    }
}

bool WallSet::confocal(double tol) const {
    for (const auto& m : members)
        if (!m.confocal(tol)) return false;
    return true;
}

double implicit_eval(const ConicSpec& spec, const Eigen::Vector2d& p) {
    const Eigen::Vector2d d = p - spec.center;
    return d.x() * d.x() / spec.A2 + d.y() * d.y() / spec.B2 - 1.0;
}

double implicit_eval(const ConicSpec& spec, const Eigen::Vector3d& q) {
    const int s = spec.space.sign();
    return q.x() * q.x() / manifold_coeff(spec.A2, s) + q.y() * q.y() / manifold_coeff(spec.B2, s) - 1.0;
}

Eigen::Vector2d implicit_gradient(const ConicSpec& spec, const Eigen::Vector2d& p) {
    const Eigen::Vector2d d = p - spec.center;
    return Eigen::Vector2d(2.0 * d.x() / spec.A2, 2.0 * d.y() / spec.B2);
}

Eigen::Vector3d implicit_gradient(const ConicSpec& spec, const Eigen::Vector3d& q) {
    const int s = spec.space.sign();
    return Eigen::Vector3d(2.0 * q.x() / manifold_coeff(spec.A2, s), 2.0 * q.y() / manifold_coeff(spec.B2, s), 0.0);
}

Eigen::Vector2d normal_at(const ConicSpec& spec, const Eigen::Vector2d& p) {
    require_on_curve(implicit_eval(spec, p));
    const Eigen::Vector2d g = implicit_gradient(spec, p);
    const Eigen::Vector2d n(g.x(), spec.space.norm_factor() * g.y());
    const double len = std::sqrt(affine_dot(n, n, spec.space));
    if (!(len > 0.0)) throw DomainError("degenerate conic gradient");
    return n / len;
}

Eigen::Vector3d normal_at(const ConicSpec& spec, const Eigen::Vector3d& q) {
    require_on_curve(implicit_eval(spec, q));
    const AmbientPoint base{q};
    // For an implicit function independent of z the Minkowski gradient equals the Euclidean one.
    const Eigen::Vector3d n = tangent_project(base, implicit_gradient(spec, q), spec.space).comps;
    const double len2 = ambient_dot(n, n, spec.space);
    if (!(len2 > 0.0)) throw DomainError("degenerate conic gradient");
    return n / std::sqrt(len2);
}

Eigen::Vector2d tangent_at(const ConicSpec& spec, const Eigen::Vector2d& p) {
    const Eigen::Vector2d n = normal_at(spec, p);
    const double k = spec.space.norm_factor();
    const Eigen::Vector2d t(-n.y() / k, n.x());
    return t / std::sqrt(affine_dot(t, t, spec.space));
}

Eigen::Vector3d tangent_at(const ConicSpec& spec, const Eigen::Vector3d& q) {
    const Eigen::Vector3d n = normal_at(spec, q);
    Eigen::Vector3d t = q.cross(n);
    if (spec.space.kind == SpaceKind::HyperboloidLower) t.z() = -t.z();
    return t / std::sqrt(ambient_dot(t, t, spec.space));
}

bool member_active(const ConicSpec& spec, const Eigen::Vector2d& chart_point) {
    if (spec.family() == ConicFamily::Hyperbola) {
        if (spec.branch == Branch::Positive && !(chart_point.y() > 0.0)) return false;
        if (spec.branch == Branch::Negative && !(chart_point.y() < 0.0)) return false;
    }
    if (spec.arc) {
        const Eigen::Vector2d d = chart_point - spec.center;
        if (!spec.arc->contains(std::atan2(d.y(), d.x()))) return false;
    }
    return true;
}

ConicSpec project_conic(const ConicSpec& spec, Direction direction) {
    if (!spec.centered()) throw DomainError("offset conics have no projective partner");
    const bool want_curved = direction == Direction::Up;
    if (spec.space.curved() == want_curved)
        throw DomainError(want_curved ? "Up projection expects a planar conic" : "Down projection expects a curved conic");
    ConicSpec out = spec;
    out.space = spec.space.partner();
    return out;
}

std::pair<double, int> crossing_function(const WallSet& wall, const Eigen::Vector2d& p) {
    double best = std::numeric_limits<double>::infinity();
    int index = -1;
    for (std::size_t i = 0; i < wall.members.size(); ++i) {
        const auto& m = wall.members[i];
        if (!member_active(m, p)) continue;
        const double v = implicit_eval(m, p);
        if (std::abs(v) < std::abs(best)) {
            best = v;
            index = static_cast<int>(i);
        }
    }
    return {best, index};
}

std::pair<double, int> crossing_function(const WallSet& wall, const Eigen::Vector3d& q) {
    const Eigen::Vector2d p = chart_of(q);
    double best = std::numeric_limits<double>::infinity();
    int index = -1;
    for (std::size_t i = 0; i < wall.members.size(); ++i) {
        const auto& m = wall.members[i];
        if (!member_active(m, p)) continue;
        const double v = implicit_eval(m, q);
        if (std::abs(v) < std::abs(best)) {
            best = v;
            index = static_cast<int>(i);
        }
    }
    return {best, index};
}

std::vector<Eigen::Vector2d> sample_conic_chart(const ConicSpec& spec, int n) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(static_cast<std::size_t>(n));
    const double b = std::sqrt(spec.B2);
    if (spec.family() == ConicFamily::Ellipse) {
        // Sample by polar angle about the center so arc windows are honored directly.
        double lo = -std::numbers::pi, span = 2.0 * std::numbers::pi;
        if (spec.arc) {
            lo = spec.arc->lo;
            span = spec.arc->hi - spec.arc->lo;
            if (span < 0.0) span += 2.0 * std::numbers::pi;
        }
        for (int i = 0; i < n; ++i) {
            const double th = lo + span * (i + 0.5) / n;
            const double c = std::cos(th), s = std::sin(th);
            const double r = 1.0 / std::sqrt(c * c / spec.A2 + s * s / spec.B2);
            out.push_back(spec.center + r * Eigen::Vector2d(c, s));
        }
        return out;
    }
    const double a = std::sqrt(-spec.A2);
    // Keep hyperbolic-space samples inside the Klein disc.
    double umax = 1.5;
    if (spec.space.formula_sign() < 0) {
        double lo = 0.0, hi = 1.5;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double r2 = a * a * std::sinh(mid) * std::sinh(mid) + spec.B2 * std::cosh(mid) * std::cosh(mid);
            (r2 < 0.98 ? lo : hi) = mid;
        }
        umax = lo;
    }
    const bool pos = spec.branch != Branch::Negative;
    const bool neg = spec.branch != Branch::Positive;
    const int per = (pos && neg) ? (n + 1) / 2 : n;
    for (int sgn : {1, -1}) {
        if ((sgn > 0 && !pos) || (sgn < 0 && !neg)) continue;
        for (int i = 0; i < per && out.size() < static_cast<std::size_t>(n); ++i) {
            const double u = -umax + 2.0 * umax * (i + 0.5) / per;
            const Eigen::Vector2d p(a * std::sinh(u), sgn * b * std::cosh(u));
            if (member_active(spec, p)) out.push_back(p);
        }
    }
    return out;
}

}  // namespace billiards
