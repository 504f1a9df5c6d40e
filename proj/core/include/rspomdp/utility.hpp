#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rspomdp/errors.hpp"

namespace rspomdp {

enum class UtilityKind { Linear, Exponential, Power, Log, PiecewiseLinearConcave };

/// Continuous strictly increasing utility applied to accumulated cost. The
/// certainty equivalent of a cost distribution is inverse(E[U(cost)]), so the
/// class exposes the map, its inverse, and one-sided derivatives (the
/// derivatives drive the truncation-error bounds of the infinite-horizon
/// solver).
///
/// Variants:
///   Linear                   U(s) = s                     (risk neutral)
///   Exponential(gamma != 0)  U(s) = exp(gamma*s)/gamma    (convex for gamma>0)
///   Power(gamma != 0)        U(s) = s^gamma/gamma, s >= 0 (convex for gamma>=1)
///   Log                      U(s) = ln(s), s > 0
///   PiecewiseLinearConcave   increasing concave interpolation of breakpoints
class Utility {
public:
    Utility() = default; // linear

    static Utility linear();
    static Utility exponential(double gamma);
    static Utility power(double gamma);
    static Utility log();
    /// Breakpoints are (x, U(x)) pairs, strictly increasing in both
    /// coordinates with non-increasing positive slopes; the first and last
    /// slopes extend beyond the ends.
    static Utility piecewise_linear_concave(std::vector<std::pair<double, double>> breakpoints);

    UtilityKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

    /// U(s). Throws DomainError outside the domain, OverflowError if the
    /// value is not representable.
    double operator()(double s) const;

    /// U^{-1}(v). Throws OutOfRange when v is outside the range of U.
    double inverse(double v) const;

    double deriv_left(double s) const;
    double deriv_right(double s) const;

    bool is_concave() const;
    bool is_convex() const;
    bool domain_includes(double s) const;

    std::string describe() const;

private:
    UtilityKind kind_ = UtilityKind::Linear;
    double gamma_ = 0.0;
    std::vector<std::pair<double, double>> points_; // piecewise breakpoints
    std::vector<double> slopes_;                    // segment slopes between breakpoints
};

} // namespace rspomdp
