#include "rspomdp/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rspomdp {

namespace {

double require_finite_value(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw OverflowError(std::string(what) + " is not representable in double precision");
    }
    return v;
}

} // namespace

Utility Utility::linear() { return Utility{}; }

Utility Utility::exponential(double gamma) {
    if (gamma == 0.0 || !std::isfinite(gamma)) {
        throw DomainError("exponential utility requires a finite nonzero gamma");
    }
    Utility u;
    u.kind_ = UtilityKind::Exponential;
    u.gamma_ = gamma;
    return u;
}

Utility Utility::power(double gamma) {
    if (gamma == 0.0 || !std::isfinite(gamma)) {
        throw DomainError("power utility requires a finite nonzero gamma");
    }
    Utility u;
    u.kind_ = UtilityKind::Power;
    u.gamma_ = gamma;
    return u;
}

Utility Utility::log() {
    Utility u;
    u.kind_ = UtilityKind::Log;
    return u;
}

Utility Utility::piecewise_linear_concave(std::vector<std::pair<double, double>> breakpoints) {
    if (breakpoints.size() < 2) {
        throw DomainError("piecewise linear utility needs at least two breakpoints");
    }
    std::vector<double> slopes;
    slopes.reserve(breakpoints.size() - 1);
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!std::isfinite(breakpoints[i].first) || !std::isfinite(breakpoints[i].second)) {
            throw DomainError("piecewise linear breakpoints must be finite");
        }
        if (i == 0) continue;
        double dx = breakpoints[i].first - breakpoints[i - 1].first;
        double du = breakpoints[i].second - breakpoints[i - 1].second;
        if (dx <= 0.0) throw DomainError("piecewise linear breakpoints must have strictly increasing x");
        if (du <= 0.0) throw DomainError("piecewise linear utility must be strictly increasing");
        double slope = du / dx;
        if (!slopes.empty() && slope > slopes.back() + 1e-12) {
            throw DomainError("piecewise linear utility must be concave (non-increasing slopes)");
        }
        slopes.push_back(slope);
    }
    Utility u;
    u.kind_ = UtilityKind::PiecewiseLinearConcave;
    u.points_ = std::move(breakpoints);
    u.slopes_ = std::move(slopes);
    return u;
}

double Utility::operator()(double s) const {
    switch (kind_) {
    case UtilityKind::Linear:
        return s;
    case UtilityKind::Exponential:
        return require_finite_value(std::exp(gamma_ * s) / gamma_, "exp(gamma*s)");
    case UtilityKind::Power:
        if (s < 0.0 || (s == 0.0 && gamma_ < 0.0)) {
            throw DomainError("power utility is defined for s >= 0 (s > 0 when gamma < 0)");
        }
        return require_finite_value(std::pow(s, gamma_) / gamma_, "s^gamma");
    case UtilityKind::Log:
        if (s <= 0.0) throw DomainError("log utility is defined for s > 0");
        return std::log(s);
    case UtilityKind::PiecewiseLinearConcave: {
        if (s <= points_.front().first) {
            return points_.front().second + slopes_.front() * (s - points_.front().first);
        }
        if (s >= points_.back().first) {
            return points_.back().second + slopes_.back() * (s - points_.back().first);
        }
        auto it = std::upper_bound(points_.begin(), points_.end(), s,
                                   [](double v, const std::pair<double, double>& p) { return v < p.first; });
        std::size_t i = static_cast<std::size_t>(it - points_.begin()) - 1;
        return points_[i].second + slopes_[i] * (s - points_[i].first);
    }
    }
    throw DomainError("unknown utility kind");
}

double Utility::inverse(double v) const {
    switch (kind_) {
    case UtilityKind::Linear:
        return v;
    case UtilityKind::Exponential: {
        double t = gamma_ * v;
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw OutOfRange("value outside the range of the exponential utility");
        }
        return std::log(t) / gamma_;
    }
    case UtilityKind::Power: {
        if (gamma_ > 0.0 && v < 0.0) throw OutOfRange("power utility with gamma > 0 has range [0, inf)");
        if (gamma_ < 0.0 && v >= 0.0) throw OutOfRange("power utility with gamma < 0 has range (-inf, 0)");
        double t = gamma_ * v;
        return std::pow(t, 1.0 / gamma_);
    }
    case UtilityKind::Log:
        return require_finite_value(std::exp(v), "exp(v)");
    case UtilityKind::PiecewiseLinearConcave: {
        if (v <= points_.front().second) {
            return points_.front().first + (v - points_.front().second) / slopes_.front();
        }
        if (v >= points_.back().second) {
            return points_.back().first + (v - points_.back().second) / slopes_.back();
        }
        auto it = std::upper_bound(points_.begin(), points_.end(), v,
                                   [](double val, const std::pair<double, double>& p) { return val < p.second; });
        std::size_t i = static_cast<std::size_t>(it - points_.begin()) - 1;
        return points_[i].first + (v - points_[i].second) / slopes_[i];
    }
    }
    throw DomainError("unknown utility kind");
}

double Utility::deriv_left(double s) const {
    switch (kind_) {
    case UtilityKind::Linear:
        return 1.0;
    case UtilityKind::Exponential:
        return std::exp(gamma_ * s);
    case UtilityKind::Power:
        if (s < 0.0) throw DomainError("power utility is defined for s >= 0");
        return std::pow(s, gamma_ - 1.0); // +inf at s=0 for gamma<1
    case UtilityKind::Log:
        if (s <= 0.0) throw DomainError("log utility is defined for s > 0");
        return 1.0 / s;
    case UtilityKind::PiecewiseLinearConcave: {
        if (s <= points_.front().first) return slopes_.front();
        if (s > points_.back().first) return slopes_.back();
        // slope of the segment covering (s - eps, s)
        auto it = std::lower_bound(points_.begin(), points_.end(), s,
                                   [](const std::pair<double, double>& p, double v) { return p.first < v; });
        std::size_t j = static_cast<std::size_t>(it - points_.begin());
        if (j < points_.size() && points_[j].first == s) {
            return j == 0 ? slopes_.front() : slopes_[j - 1];
        }
        return slopes_[j - 1];
    }
    }
    throw DomainError("unknown utility kind");
}

double Utility::deriv_right(double s) const {
    switch (kind_) {
    case UtilityKind::Linear:
    case UtilityKind::Exponential:
    case UtilityKind::Power:
    case UtilityKind::Log:
        return deriv_left(s); // smooth variants
    case UtilityKind::PiecewiseLinearConcave: {
        if (s < points_.front().first) return slopes_.front();
        if (s >= points_.back().first) return slopes_.back();
        // slope of the segment covering (s, s + eps)
        auto it = std::upper_bound(points_.begin(), points_.end(), s,
                                   [](double v, const std::pair<double, double>& p) { return v < p.first; });
        std::size_t j = static_cast<std::size_t>(it - points_.begin());
        return slopes_[j - 1];
    }
    }
    throw DomainError("unknown utility kind");
}

bool Utility::is_concave() const {
    switch (kind_) {
    case UtilityKind::Linear: return true;
    case UtilityKind::Exponential: return gamma_ < 0.0;
    case UtilityKind::Power: return gamma_ <= 1.0;
    case UtilityKind::Log: return true;
    case UtilityKind::PiecewiseLinearConcave: return true;
    }
    return false;
}

bool Utility::is_convex() const {
    switch (kind_) {
    case UtilityKind::Linear: return true;
    case UtilityKind::Exponential: return gamma_ > 0.0;
    case UtilityKind::Power: return gamma_ >= 1.0;
    case UtilityKind::Log: return false;
    case UtilityKind::PiecewiseLinearConcave: return false;
    }
    return false;
}

bool Utility::domain_includes(double s) const {
    if (!std::isfinite(s)) return false;
    switch (kind_) {
    case UtilityKind::Linear:
    case UtilityKind::Exponential:
    case UtilityKind::PiecewiseLinearConcave:
        return true;
    case UtilityKind::Power:
        return gamma_ > 0.0 ? s >= 0.0 : s > 0.0;
    case UtilityKind::Log:
        return s > 0.0;
    }
    return false;
}

std::string Utility::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case UtilityKind::Linear: os << "linear"; break;
    case UtilityKind::Exponential: os << "exponential(gamma=" << gamma_ << ")"; break;
    case UtilityKind::Power: os << "power(gamma=" << gamma_ << ")"; break;
    case UtilityKind::Log: os << "log"; break;
    case UtilityKind::PiecewiseLinearConcave:
        os << "piecewise_linear_concave(" << points_.size() << " breakpoints)";
        break;
    }
    return os.str();
}

} // namespace rspomdp
