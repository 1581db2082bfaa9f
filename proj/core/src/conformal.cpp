#include "billiards/conformal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <numbers>

#include "billiards/conics.hpp"
#include "billiards/curves.hpp"
#include "billiards/errors.hpp"
#include "billiards/spaces.hpp"

namespace billiards {

namespace {

using Y5 = OdeVec<5>;

struct Coeffs {
    double K = 0.0;   // kinetic factor, H = K |w|^2 + V
    double dK = 0.0;  // dK / dr
    double V = 0.0;
    double dV = 0.0;  // dV / dr
};

Coeffs coeffs(const ConformalSystem& sys, double r) {
    const double f = sys.strength;
    Coeffs c;
    switch (sys.kind) {
        case ConformalKind::SphericalHooke: {
            const double d = 1.0 - r;
            if (std::abs(d) < 1e-12) throw DomainError("spherical Hooke chart evaluated on the blow-up circle");
            c.K = (1.0 + r) * (1.0 + r) / 8.0;
            c.dK = (1.0 + r) / 4.0;
            c.V = 4.0 * f * r / (d * d);
            c.dV = 4.0 * f * (1.0 + r) / (d * d * d);
            break;
        }
        case ConformalKind::HyperbolicHooke: {
            if (!(r < 1.0)) throw DomainError("point outside the Poincare disc");
            const double d = 1.0 + r;
            c.K = (1.0 - r) * (1.0 - r) / 8.0;
            c.dK = -(1.0 - r) / 4.0;
            c.V = 4.0 * f * r / (d * d);
            c.dV = 4.0 * f * (1.0 - r) / (d * d * d);
            break;
        }
        case ConformalKind::HyperbolicKepler: {
            if (!(r < 1.0)) throw DomainError("point outside the Poincare disc");
            if (!(r > 0.0)) throw SingularityError("Kepler center reached", 0);
            const double sr = std::sqrt(r);
            c.K = (1.0 - r) * (1.0 - r) / 8.0;
            c.dK = -(1.0 - r) / 4.0;
            c.V = -f * (1.0 + r) / (2.0 * sr);
            c.dV = f * (1.0 - r) / (4.0 * r * sr);
            break;
        }
    }
    return c;
}

void rhs(const ConformalSystem& sys, const Y5& y, Y5& dy) {
    const double r = y[0] * y[0] + y[1] * y[1];
    const double w2 = y[2] * y[2] + y[3] * y[3];
    const Coeffs c = coeffs(sys, r);
    const double g = -2.0 * (c.dK * w2 + c.dV);
    dy[0] = 2.0 * c.K * y[2];
    dy[1] = 2.0 * c.K * y[3];
    dy[2] = g * y[0];
    dy[3] = g * y[1];
    dy[4] = std::hypot(dy[0], dy[1]);
}

// Integrates with samples every opt.sample_dt; y[4] accumulates the arc length of z.
ConformalOrbit drive(const ConformalSystem& sys, cplx z0, cplx w0, double t_end, const ConformalOptions& opt,
                     const std::function<bool(const ConformalOrbit&, double)>& stop) {
    IntegratorOptions io;
    io.rtol = opt.rtol;
    io.atol = opt.atol;
    auto f = [&](double, const Y5& y, Y5& dy) { rhs(sys, y, dy); };
    Y5 y = {z0.real(), z0.imag(), w0.real(), w0.imag(), 0.0};
    ConformalOrbit orbit;
    auto record = [&](double t) {
        Y5 dy;
        f(t, y, dy);
        orbit.t.push_back(t);
        orbit.z.emplace_back(y[0], y[1]);
        orbit.w.emplace_back(y[2], y[3]);
        orbit.zdot.emplace_back(dy[0], dy[1]);
    };
    double t = 0.0;
    record(t);
    long k = 1;
    double h = opt.sample_dt / 4.0;
    bool rejected = false;
    while (t < t_end) {
        const double target = std::min(opt.sample_dt * static_cast<double>(k), t_end);
        const bool clamped = h >= target - t;
        const double h_try = clamped ? target - t : h;
        Y5 f0;
        f(t, y, f0);
        const auto trial = dop853_trial<5>(f, t, y, f0, h_try, io);
        if (!(trial.error_norm < 1.0)) {
            h = h_try * dop853_factor(trial.error_norm, false);
            if (h < io.h_min) throw NumericalError("conformal integration step size underflow");
            rejected = true;
            continue;
        }
        y = trial.y;
        const double h_next = h_try * dop853_factor(trial.error_norm, rejected);
        rejected = false;
        if (clamped) {
            t = target;
            ++k;
            record(t);
            if (stop && stop(orbit, y[4])) break;
            h = std::max(h, h_next);
        } else {
            t += h_try;
            h = h_next;
        }
    }
    return orbit;
}

double shell_drift(const ConformalSystem& sys, const ConformalOrbit& o, double level) {
    double d = 0.0;
    for (std::size_t i = 0; i < o.t.size(); ++i) d = std::max(d, std::abs(hamiltonian(sys, o.z[i], o.w[i]) - level));
    return d;
}

ArcLengthCurve<2> curve(const std::vector<double>& t, const std::vector<cplx>& p, const std::vector<cplx>& v) {
    std::vector<Eigen::Vector2d> P, V;
    for (std::size_t i = 0; i < t.size(); ++i) {
        P.emplace_back(p[i].real(), p[i].imag());
        V.emplace_back(v[i].real(), v[i].imag());
    }
    return ArcLengthCurve<2>(t, P, V);
}

double compare_curves(const ArcLengthCurve<2>& a, const ArcLengthCurve<2>& b) {
    const double L = std::min(a.length(), b.length());
    const int n = std::max<int>(256, 4 * static_cast<int>(a.size() + b.size()));
    double d = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = L * i / n;
        d = std::max(d, (a.point_at(s) - b.point_at(s)).norm());
    }
    return d;
}

// Rotated gnomonic coefficients of the factor a branch lands on (sign +1: G2, -1: G1).
std::pair<double, double> factor_axes(double a, double B, int sign) {
    const double b = sign * B;
    const double num = 2.0 * (B * B - a * a);
    return {num / ((a - 1.0) * (b - 1.0) * (b - a)), -num / ((a + 1.0) * (b - 1.0) * (b + a))};
}

double centered_sphere_residual(double a, double B, const Eigen::Vector3d& S) {
    const double x = S.x(), y = S.y(), z = S.z();
    const double quart = x * x * x * x + 2.0 * x * x * y * y + y * y * y * y;
    const double D = z * z * z * z - 4.0 * z * z * z + (6.0 - 4.0 * x * y * a) * z * z + (8.0 * x * y * a - 4.0) * z +
                     quart - 4.0 * a * x * y + 1.0;
    const double N = a * z * z * z * z - 4.0 * a * z * z * z + (6.0 * a - 4.0 * x * y) * z * z +
                     (8.0 * x * y - 4.0 * a) * z + (quart + 1.0) * a - 4.0 * x * y;
    const double zm = (z - 1.0) * (z - 1.0);
    const double d2 = x * x - y * y;
    return 4.0 * (1.0 - a * a) * (1.0 - a * a) * zm * zm * d2 * d2 / ((B + a) * (B - a) * D * D) +
           N * N / (B * B * D * D) - 1.0;
}

}  // namespace

double conformal_factor(ChartSystemKind kind, cplx q) {
    const double r = std::norm(q);
    const double d = kind == ChartSystemKind::SphereStereo ? 1.0 + r : 1.0 - r;
    if (!(d > 0.0)) throw DomainError("point outside the Poincare disc");
    return 4.0 / (d * d);
}

std::pair<cplx, cplx> square_map(cplx z, cplx w) {
    if (z == cplx(0.0, 0.0)) throw DomainError("square map momentum undefined at z = 0");
    return {z * z, w / (2.0 * std::conj(z))};
}

double hamiltonian(const ConformalSystem& sys, cplx z, cplx w) {
    const Coeffs c = coeffs(sys, std::norm(z));
    return c.K * std::norm(w) + c.V;
}

double hamiltonian_on_shell(const ConformalSystem& sys, cplx z, cplx w, double level) {
    return hamiltonian(sys, z, w) - level;
}

double energy_level_relation(double f, double mhat, int sign) { return -(4.0 * f + sign * 2.0 * mhat); }

ConformalOrbit integrate_conformal(const ConformalSystem& sys, cplx z0, cplx w0, double t_end,
                                   const ConformalOptions& opt) {
    return drive(sys, z0, w0, t_end, opt, {});
}

double revolution_time(const ConformalSystem& sys, cplx z0, cplx w0, const ConformalOptions& opt) {
    if (z0 == cplx(0.0, 0.0)) throw DomainError("revolution time undefined for an orbit through the center");
    double turned = 0.0;
    double result = -1.0;
    auto stop = [&](const ConformalOrbit& o, double) {
        const std::size_t n = o.z.size();
        const double step = std::arg(o.z[n - 1] / o.z[n - 2]);
        if (std::abs(turned + step) >= 2.0 * std::numbers::pi) {
            const double frac = (2.0 * std::numbers::pi - std::abs(turned)) / std::abs(step);
            result = o.t[n - 2] + frac * (o.t[n - 1] - o.t[n - 2]);
            return true;
        }
        turned += step;
        return false;
    };
    drive(sys, z0, w0, 1e4, opt, stop);
    if (result < 0.0) throw NumericalError("orbit did not complete a revolution");
    return result;
}

const char* to_string(Pairing p) {
    switch (p) {
        case Pairing::SphericalHookeKepler: return "spherical-hooke/hyperbolic-kepler";
        case Pairing::HyperbolicHookeKepler: return "hyperbolic-hooke/hyperbolic-kepler";
        case Pairing::SphericalHyperbolicHooke: return "spherical-hooke/hyperbolic-hooke";
    }
    return "?";
}

OrbitCorrespondence verify_orbit_correspondence(Pairing pairing, const ConformalSystem& hooke, cplx z0, cplx w0,
                                                double t_span, const ConformalOptions& opt) {
    const bool want_sphere = pairing != Pairing::HyperbolicHookeKepler;
    if (hooke.kind != (want_sphere ? ConformalKind::SphericalHooke : ConformalKind::HyperbolicHooke))
        throw DomainError(std::string("source system does not match pairing ") + to_string(pairing));
    if (z0 == cplx(0.0, 0.0)) throw DomainError("Hooke orbit starts at the branch point z = 0");

    OrbitCorrespondence out;
    const double f = hooke.strength;
    const double mhat = hamiltonian(hooke, z0, w0);
    out.source_level = mhat;
    out.t_span = t_span > 0.0 ? t_span : revolution_time(hooke, z0, w0, opt);

    const ConformalOrbit src = integrate_conformal(hooke, z0, w0, out.t_span, opt);
    out.source_shell_drift = shell_drift(hooke, src, mhat);

    std::vector<cplx> image = src.z, image_dot = src.zdot;
    cplx q0 = z0, p0 = w0;
    if (pairing == Pairing::SphericalHyperbolicHooke) {
        out.partner = {ConformalKind::HyperbolicHooke, f + mhat};
        out.partner_level = mhat;
    } else {
        for (std::size_t i = 0; i < image.size(); ++i) {
            image[i] = src.z[i] * src.z[i];
            image_dot[i] = 2.0 * src.z[i] * src.zdot[i];
        }
        out.partner = {ConformalKind::HyperbolicKepler, 2.0 * mhat};
        out.partner_level = energy_level_relation(f, mhat, want_sphere ? +1 : -1);
        q0 = z0 * z0;
        p0 = w0 / std::conj(z0);
    }
    out.level_defect = std::abs(hamiltonian(out.partner, q0, p0) - out.partner_level);

    const ArcLengthCurve<2> img = curve(src.t, image, image_dot);
    const double L = img.length();
    auto stop = [&](const ConformalOrbit&, double s) { return s >= L; };
    const ConformalOrbit par = drive(out.partner, q0, p0, 100.0 * out.t_span + 100.0, opt, stop);
    out.partner_shell_drift = shell_drift(out.partner, par, out.partner_level);
    const ArcLengthCurve<2> pc = curve(par.t, par.z, par.zdot);
    if (pc.length() < L * (1.0 - 1e-9)) throw NumericalError("partner orbit shorter than its image counterpart");
    out.max_deviation = compare_curves(img, pc);
    return out;
}

ConfocalImageReport confocal_image_check(double a, double B, int n_samples) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("confocal image check needs 0 < a < 1");
    const SpaceSpec hyp = SpaceSpec::hyperboloid(a);
    const SpaceSpec sph = SpaceSpec::sphere(0.0);
    ConfocalImageReport rep;
    rep.a = a;
    rep.B = B;
    rep.expected_c = 2.0 * std::sqrt(a) / (1.0 - a);
    const double s = std::sqrt(1.0 - a * a);

    const bool hyperbola = B < a;
    const auto g1 = factor_axes(a, B, -1);
    rep.g1_empty = g1.first < 0.0 && g1.second < 0.0;

    double worst_c = 0.0;
    for (int br : {1, -1}) {
        if (!hyperbola && br < 0) continue;
        const ConicSpec conic = ConicSpec::from_B(hyp, B, hyperbola ? (br > 0 ? Branch::Positive : Branch::Negative) : Branch::Both);
        const auto chart = sample_conic_chart(conic, n_samples);
        const auto axes = factor_axes(a, B, br);
        std::vector<Eigen::Vector2d> rotated;
        cplx prev(0.0, 0.0);
        bool have_prev = false;
        bool prev_principal = true;
        for (const auto& p : chart) {
            const Eigen::Vector3d H = central_lift_up(GnomonicPoint{p}, hyp).coords;
            // Move the focus over (0, a) to the pole.
            const double y = s * (H.y() - a * H.z()) / (1.0 - a * a);
            const double z = s * (H.z() - a * H.y()) / (1.0 - a * a);
            const AmbientPoint moved{Eigen::Vector3d(H.x(), y, z)};
            const Eigen::Vector2d w = stereographic_chart(moved, hyp).coords;
            const cplx q(w.x(), w.y());
            const cplx principal = std::sqrt(q);
            cplx root = principal;
            if (have_prev && std::abs(-principal - prev) < std::abs(principal - prev)) root = -principal;
            const bool is_principal = root == principal;
            if (have_prev && is_principal != prev_principal) ++rep.branch_jumps;
            prev = root;
            prev_principal = is_principal;
            have_prev = true;
            for (const cplx zz : {root, -root}) {
                const AmbientPoint S = stereographic_inverse(StereoPoint{Eigen::Vector2d(zz.real(), zz.imag())}, sph);
                const Eigen::Vector2d g = central_project_down(S, sph).coords;
                const double X = (g.x() + g.y()) / std::sqrt(2.0), Yr = (g.x() - g.y()) / std::sqrt(2.0);
                rep.sphere_residual = std::max(rep.sphere_residual, std::abs(centered_sphere_residual(a, B, S.coords)));
                rep.factor_residual = std::max(rep.factor_residual, std::abs(X * X / axes.first + Yr * Yr / axes.second - 1.0));
                rotated.emplace_back(X, Yr);
                ++rep.points;
            }
        }
        Eigen::MatrixXd M(static_cast<Eigen::Index>(rotated.size()), 3);
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(rotated.size()));
        for (std::size_t i = 0; i < rotated.size(); ++i)
            M.row(static_cast<Eigen::Index>(i)) << rotated[i].x() * rotated[i].x(), rotated[i].x() * rotated[i].y(),
                rotated[i].y() * rotated[i].y();
        const Eigen::Vector3d coef = M.colPivHouseholderQr().solve(ones);
        rep.fit_residual = std::max(rep.fit_residual, (M * coef - ones).cwiseAbs().maxCoeff());
        const double PX = 1.0 / coef(0), PY = 1.0 / coef(2);
        const double c = std::sqrt((PX - PY) / (1.0 + PY));
        if (worst_c == 0.0 || std::abs(c - rep.expected_c) > std::abs(worst_c - rep.expected_c)) worst_c = c;
    }
    rep.measured_c = worst_c;
    return rep;
}

double confocal_family_spread(double a, const std::vector<double>& Bs, int n_samples) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double B : Bs) {
        const double c = confocal_image_check(a, B, n_samples).measured_c;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    return hi - lo;
}

}  // namespace billiards
