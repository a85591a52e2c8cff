#include "agecharge/battery/interp.hpp"

#include <algorithm>
#include <cmath>

#include "agecharge/common/errors.hpp"

namespace agecharge::battery {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y, std::string name)
    : x_(std::move(x)), y_(std::move(y)), name_(std::move(name)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
        throw ConfigError(name_, "table needs at least two (x, y) samples of equal length");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(x_[i + 1] > x_[i])) throw ConfigError(name_, "table abscissae must be strictly increasing");
    }
    for (double v : y_) {
        if (!std::isfinite(v)) throw ConfigError(name_, "table values must be finite");
    }

    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m_[i] = 0.0;
        } else {
            // weighted harmonic mean (Fritsch-Butland form of the FC condition)
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            const double w1 = 2.0 * h1 + h0;
            const double w2 = h1 + 2.0 * h0;
            m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // endpoint slopes: keep sign consistent with the adjacent secant
    for (std::size_t e : {std::size_t{0}, n - 1}) {
        const double de = e == 0 ? d[0] : d[n - 2];
        if (m_[e] * de < 0.0) m_[e] = 0.0;
        if (std::abs(m_[e]) > 3.0 * std::abs(de)) m_[e] = 3.0 * de;
    }

    const double h = (x_.back() - x_.front()) / static_cast<double>(n - 1);
    uniform_ = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs((x_[i + 1] - x_[i]) - h) > 1e-9 * h) {
            uniform_ = false;
            break;
        }
    }
    inv_h_ = 1.0 / h;
}

std::size_t MonotoneCubic::locate(double x) const {
    if (!(x >= x_.front() && x <= x_.back())) {
        throw DomainError("table '" + name_ + "' evaluated at " + std::to_string(x) + " outside [" +
                          std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
    }
    const std::size_t last = x_.size() - 2;
    if (uniform_) {
        auto i = static_cast<std::size_t>((x - x_.front()) * inv_h_);
        i = std::min(i, last);
        // guard against rounding at cell edges
        if (i > 0 && x < x_[i]) --i;
        if (i < last && x > x_[i + 1]) ++i;
        return i;
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    auto i = static_cast<std::size_t>(std::distance(x_.begin(), it));
    return std::min(i == 0 ? 0 : i - 1, last);
}

double MonotoneCubic::operator()(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double d00 = (6.0 * t2 - 6.0 * t) / h;
    const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
    const double d01 = (-6.0 * t2 + 6.0 * t) / h;
    const double d11 = 3.0 * t2 - 2.0 * t;
    return d00 * y_[i] + d10 * m_[i] + d01 * y_[i + 1] + d11 * m_[i + 1];
}

}  // namespace agecharge::battery
