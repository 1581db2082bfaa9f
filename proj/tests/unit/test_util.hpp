#pragma once

#include <random>

#include <Eigen/Core>

namespace billiards::test {

inline Eigen::Vector2d random_disc(std::mt19937_64& rng, double R) {
    std::uniform_real_distribution<double> u(-R, R);
    while (true) {
        Eigen::Vector2d p(u(rng), u(rng));
        if (p.norm() < R) return p;
    }
}

inline Eigen::Vector2d random_normal2(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return {g(rng), g(rng)};
}

inline Eigen::Vector3d random_normal3(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return {g(rng), g(rng), g(rng)};
}

}  // namespace billiards::test
