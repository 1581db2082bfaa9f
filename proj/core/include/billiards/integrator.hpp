#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "billiards/dop853_tableau.hpp"

namespace billiards {

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double h_min = 1e-14;
    // Upper bound on a single step; 0 means unbounded.
    double h_max = 0.0;

    // Defaults, with rtol and atol overridden by the BILLIARDS_TOL environment variable if set.
    static IntegratorOptions defaults();
};

template <std::size_t N>
using OdeVec = std::array<double, N>;

template <std::size_t N>
struct StepTrial {
    OdeVec<N> y;
    double error_norm = 0.0;
};

// Explicit Dormand-Prince 8(5,3) step with the scaled error norm used by DOP853.
// Rhs is callable as void(double t, const OdeVec<N>& y, OdeVec<N>& dy).
template <std::size_t N, class Rhs>
StepTrial<N> dop853_trial(const Rhs& rhs, double t, const OdeVec<N>& y, const OdeVec<N>& f0, double h,
                          const IntegratorOptions& opt) {
    using namespace detail::dop853;
    std::array<OdeVec<N>, kStages> K;
    K[0] = f0;
    OdeVec<N> tmp;
    for (int s = 1; s < kStages; ++s) {
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (int j = 0; j < s; ++j) acc += kA[s][j] * K[j][i];
            tmp[i] = y[i] + h * acc;
        }
        rhs(t + kC[s] * h, tmp, K[s]);
    }
    StepTrial<N> out;
    double e5 = 0.0, e3 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0, err5 = 0.0, err3 = 0.0;
        for (int j = 0; j < kStages; ++j) {
            acc += kB[j] * K[j][i];
            err5 += kE5[j] * K[j][i];
            err3 += kE3[j] * K[j][i];
        }
        out.y[i] = y[i] + h * acc;
        const double scale = opt.atol + std::max(std::abs(y[i]), std::abs(out.y[i])) * opt.rtol;
        e5 += (err5 / scale) * (err5 / scale);
        e3 += (err3 / scale) * (err3 / scale);
    }
    if (e5 == 0.0 && e3 == 0.0) {
        out.error_norm = 0.0;
    } else {
        out.error_norm = std::abs(h) * e5 / std::sqrt((e5 + 0.01 * e3) * static_cast<double>(N));
    }
    return out;
}

// Step-size factor after a trial with the given error norm.
inline double dop853_factor(double error_norm, bool accepted_after_reject) {
    constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 10.0;
    if (error_norm < 1.0) {
        double factor = error_norm == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(error_norm, -0.125));
        return accepted_after_reject ? std::min(1.0, factor) : factor;
    }
    return std::max(kMinFactor, kSafety * std::pow(error_norm, -0.125));
}

}  // namespace billiards
