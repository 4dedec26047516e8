#pragma once

#include <cmath>
#include <cstdlib>
#include <span>
#include <string>

namespace searchbias {

/// Neumaier-compensated accumulator. Probability sums feed tolerance checks as
/// tight as 1e-12, so plain left-to-right addition is not good enough.
class KahanSum {
public:
    void add(double x) noexcept {
        const double s = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - s) + x;
        } else {
            comp_ += (x - s) + sum_;
        }
        sum_ = s;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) noexcept {
    KahanSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

/// Shortest decimal string that parses back to exactly this double.
std::string format_double(double x);

}  // namespace searchbias
