#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace billiards {

// Piecewise cubic Hermite curve through time-stamped points and velocities, reparametrized by arc length.
template <int D>
class ArcLengthCurve {
public:
    using V = Eigen::Matrix<double, D, 1>;

    ArcLengthCurve() = default;

    ArcLengthCurve(const std::vector<double>& t, const std::vector<V>& p, const std::vector<V>& v) {
        if (t.size() != p.size() || t.size() != v.size()) throw std::invalid_argument("curve node arrays differ in length");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!t_.empty() && !(t[i] > t_.back())) continue;
            t_.push_back(t[i]);
            p_.push_back(p[i]);
            v_.push_back(v[i]);
        }
        cum_.assign(t_.size(), 0.0);
        for (std::size_t i = 1; i < t_.size(); ++i) cum_[i] = cum_[i - 1] + segment_length(i - 1, 1.0);
    }

    bool empty() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }
    double length() const { return cum_.empty() ? 0.0 : cum_.back(); }
    const V& front() const { return p_.front(); }
    const V& back() const { return p_.back(); }

    V point_at(double s) const {
        if (t_.size() == 1 || s <= 0.0) return p_.front();
        if (s >= length()) return p_.back();
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
        const std::size_t i = static_cast<std::size_t>(it - cum_.begin()) - 1;
        const double target = s - cum_[i];
        const double seg = cum_[i + 1] - cum_[i];
        double lo = 0.0, hi = 1.0;
        double th = seg > 0.0 ? target / seg : 0.0;
        for (int it2 = 0; it2 < 60; ++it2) {
            const double g = segment_length(i, th) - target;
            if (std::abs(g) < 1e-15 * std::max(1.0, seg)) break;
            (g > 0.0 ? hi : lo) = th;
            const double d = speed(i, th);
            double next = d > 0.0 ? th - g / d : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            th = next;
        }
        return eval(i, th);
    }

private:
    V eval(std::size_t i, double th) const {
        const double h = t_[i + 1] - t_[i];
        const double t2 = th * th, t3 = t2 * th;
        return (2 * t3 - 3 * t2 + 1) * p_[i] + (t3 - 2 * t2 + th) * h * v_[i] + (-2 * t3 + 3 * t2) * p_[i + 1] +
               (t3 - t2) * h * v_[i + 1];
    }

    double speed(std::size_t i, double th) const {
        const double h = t_[i + 1] - t_[i];
        const double t2 = th * th;
        const V d = (6 * t2 - 6 * th) * p_[i] + (3 * t2 - 4 * th + 1) * h * v_[i] + (-6 * t2 + 6 * th) * p_[i + 1] +
                    (3 * t2 - 2 * th) * h * v_[i + 1];
        return d.norm();
    }

    // Arc length over [0, th] of segment i: composite 8-point Gauss-Legendre on two halves.
    double segment_length(std::size_t i, double th) const {
        static constexpr std::array<double, 4> x = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                    0.9602898564975363};
        static constexpr std::array<double, 4> w = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                    0.1012285362903763};
        double total = 0.0;
        const double half = 0.5 * th;
        for (int part = 0; part < 2; ++part) {
            const double a = part * half;
            const double c = a + 0.5 * half, r = 0.5 * half;
            for (int k = 0; k < 4; ++k) total += w[k] * r * (speed(i, c - r * x[k]) + speed(i, c + r * x[k]));
        }
        return total;
    }

    std::vector<double> t_;
    std::vector<V> p_;
    std::vector<V> v_;
    std::vector<double> cum_;
};

}  // namespace billiards
