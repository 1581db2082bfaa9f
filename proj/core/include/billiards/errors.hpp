#pragma once

#include <stdexcept>
#include <string>

namespace billiards {

// Input outside a chart or geometry domain (equator, disc boundary, bad parameter).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Force or energy evaluated too close to a Kepler center or singular set.
class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, int center) : std::runtime_error(what), center_(center) {}
    // 0 and 1 are the Kepler centers, 2 is the Hooke singular set.
    int center() const noexcept { return center_; }

private:
    int center_;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace billiards
