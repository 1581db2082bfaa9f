#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "billiards/integrator.hpp"

namespace billiards {

using cplx = std::complex<double>;

enum class ChartSystemKind { SphereStereo, HyperbolicPoincare };

// Metric factor 4 / (1 +- |q|^2)^2 of the round (+) or hyperbolic (-) chart.
double conformal_factor(ChartSystemKind kind, cplx q);

enum class ConformalKind { SphericalHooke, HyperbolicHooke, HyperbolicKepler };

// Hooke systems: H = (1 +- r)^2 |w|^2 / 8 + 4 f r / (1 -+ r)^2 with r = |z|^2.
// Hyperbolic Kepler: H = (1 - |q|^2)^2 |p|^2 / 8 - mu (1 + |q|^2) / (2 |q|).
struct ConformalSystem {
    ConformalKind kind = ConformalKind::SphericalHooke;
    double strength = 0.0;
};

// (z, w) -> (z^2, w / (2 conj z)).
std::pair<cplx, cplx> square_map(cplx z, cplx w);

double hamiltonian(const ConformalSystem& sys, cplx z, cplx w);
double hamiltonian_on_shell(const ConformalSystem& sys, cplx z, cplx w, double level);

// -(4 f + sign 2 m-hat).
double energy_level_relation(double f, double mhat, int sign);

struct ConformalOrbit {
    std::vector<double> t;
    std::vector<cplx> z;
    std::vector<cplx> w;
    std::vector<cplx> zdot;
};

struct ConformalOptions {
    double rtol = 1e-12;
    double atol = 1e-12;
    double sample_dt = 0.002;
};

ConformalOrbit integrate_conformal(const ConformalSystem& sys, cplx z0, cplx w0, double t_end,
                                   const ConformalOptions& opt = {});

// Time for the polar angle of z to advance by a full turn.
double revolution_time(const ConformalSystem& sys, cplx z0, cplx w0, const ConformalOptions& opt = {});

enum class Pairing { SphericalHookeKepler, HyperbolicHookeKepler, SphericalHyperbolicHooke };
const char* to_string(Pairing p);

struct OrbitCorrespondence {
    double max_deviation = 0.0;
    double source_level = 0.0;
    double partner_level = 0.0;
    // |H_partner(initial image) - predicted level|.
    double level_defect = 0.0;
    double source_shell_drift = 0.0;
    double partner_shell_drift = 0.0;
    double t_span = 0.0;
    ConformalSystem partner;
};

// Integrates the Hooke orbit from (z0, w0) for t_span (one revolution if t_span <= 0), maps it
// to the partner system and compares it by arc length with an independently integrated partner orbit.
OrbitCorrespondence verify_orbit_correspondence(Pairing pairing, const ConformalSystem& hooke, cplx z0, cplx w0,
                                                double t_span = 0.0, const ConformalOptions& opt = {});

struct ConfocalImageReport {
    double a = 0.0;
    double B = 0.0;
    int points = 0;
    // Residual of the centered spherical conic in ambient sphere coordinates.
    double sphere_residual = 0.0;
    // Residual of the rotated gnomonic factor the branch belongs to.
    double factor_residual = 0.0;
    double measured_c = 0.0;
    double expected_c = 0.0;
    double fit_residual = 0.0;
    // Both coefficients of the complementary factor negative (no real points).
    bool g1_empty = false;
    int branch_jumps = 0;
};

// Samples the confocal conic with parameter B of the hyperbolic family with foci over (0, +-a),
// moves one focus to the pole, maps it through z -> sqrt(q) to the sphere and checks the image
// is a centered conic with foci at +-2 sqrt(a) / (1 - a) on the rotated gnomonic axis.
ConfocalImageReport confocal_image_check(double a, double B, int n_samples);

// Max spread of the measured foci over several members of one family.
double confocal_family_spread(double a, const std::vector<double>& Bs, int n_samples);

}  // namespace billiards
