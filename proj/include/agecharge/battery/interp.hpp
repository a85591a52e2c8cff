#pragma once

#include <span>
#include <string>
#include <vector>

namespace agecharge::battery {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Monotone data gives a monotone interpolant. Evaluation outside [x.front(), x.back()]
/// throws DomainError.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y, std::string name = {});

    double operator()(double x) const;
    double derivative(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    std::span<const double> xs() const { return x_; }
    std::span<const double> ys() const { return y_; }
    const std::string& name() const { return name_; }
    bool empty() const { return x_.empty(); }

private:
    std::size_t locate(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
    std::string name_;
    bool uniform_ = false;
    double inv_h_ = 0.0;
};

}  // namespace agecharge::battery
