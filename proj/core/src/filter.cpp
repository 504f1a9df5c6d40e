#include "rspomdp/filter.hpp"

#include <cmath>
#include <sstream>

namespace rspomdp {

namespace {

void check_z(double z) {
    if (!(z > 0.0) || z > 1.0) throw DomainError("cost weight z must lie in (0, 1]");
}

double exp_checked(double e) {
    double v = std::exp(e);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "exp(" << e << ") overflows; rescale gamma or the costs";
        throw OverflowError(os.str());
    }
    return v;
}

} // namespace

JointMeasure psi_update(const ModelSpec& m, int x, int a, int xp, const JointMeasure& mu, double z) {
    m.require_admissible(x, a);
    check_z(z);
    const int ny = m.num_y();

    std::vector<double> mu_y(static_cast<std::size_t>(ny), 0.0);
    for (const Atom& at : mu.atoms()) mu_y[static_cast<std::size_t>(at.y)] += at.w;

    double denom = 0.0;
    for (int y = 0; y < ny; ++y) {
        if (mu_y[static_cast<std::size_t>(y)] > 0.0) {
            denom += mu_y[static_cast<std::size_t>(y)] * m.qx(x, y, a, xp);
        }
    }
    if (!(denom > kDenominatorFloor)) {
        std::ostringstream os;
        os << "observation x'=" << xp << " has predictive probability " << denom
           << " from x=" << x << " under action " << a;
        throw UnreachableObservation(os.str(), denom);
    }

    std::vector<Atom> out;
    out.reserve(mu.size() * static_cast<std::size_t>(ny));
    for (const Atom& at : mu.atoms()) {
        const double shifted = at.s + z * m.cost(x, at.y, a);
        for (int yp = 0; yp < ny; ++yp) {
            double k = m.trans(x, at.y, a, xp, yp);
            if (k > 0.0) out.push_back({yp, shifted, at.w * k / denom});
        }
    }
    return JointMeasure(std::move(out));
}

BeliefY phi_update(const ModelSpec& m, int x, int a, int xp, const BeliefY& nu) {
    return psi_e_update(m, x, a, xp, nu, 0.0);
}

BeliefY psi_e_update(const ModelSpec& m, int x, int a, int xp, const BeliefY& nu, double zeta) {
    m.require_admissible(x, a);
    const int ny = m.num_y();
    if (nu.size() != ny) throw DomainError("belief dimension does not match the model");

    std::vector<double> out(static_cast<std::size_t>(ny), 0.0);
    double denom = 0.0;
    for (int y = 0; y < ny; ++y) {
        if (nu[y] <= 0.0) continue;
        const double f = zeta == 0.0 ? nu[y] : nu[y] * exp_checked(zeta * m.cost(x, y, a));
        for (int yp = 0; yp < ny; ++yp) {
            double k = m.trans(x, y, a, xp, yp);
            if (k > 0.0) {
                out[static_cast<std::size_t>(yp)] += f * k;
                denom += f * k;
            }
        }
    }
    if (!(denom > kDenominatorFloor)) {
        std::ostringstream os;
        os << "observation x'=" << xp << " has predictive weight " << denom
           << " from x=" << x << " under action " << a;
        throw UnreachableObservation(os.str(), denom);
    }
    for (double& v : out) v /= denom;
    return BeliefY(std::move(out));
}

std::vector<double> qhat_x(const ModelSpec& m, int x, const BeliefY& nu, int a, double zeta) {
    m.require_admissible(x, a);
    const int ny = m.num_y();
    if (nu.size() != ny) throw DomainError("belief dimension does not match the model");

    std::vector<double> out(static_cast<std::size_t>(m.num_x()), 0.0);
    for (int y = 0; y < ny; ++y) {
        if (nu[y] <= 0.0) continue;
        const double f = zeta == 0.0 ? nu[y] : nu[y] * exp_checked(zeta * m.cost(x, y, a));
        for (int xp = 0; xp < m.num_x(); ++xp) {
            out[static_cast<std::size_t>(xp)] += f * m.qx(x, y, a, xp);
        }
    }
    return out;
}

JointMeasure psi_p_update(const ModelSpec& m, int x, int a, int xp, const JointMeasure& mu) {
    m.require_admissible(x, a);
    const int ny = m.num_y();

    std::vector<double> mu_y(static_cast<std::size_t>(ny), 0.0);
    for (const Atom& at : mu.atoms()) mu_y[static_cast<std::size_t>(at.y)] += at.w;

    double denom = 0.0;
    for (int y = 0; y < ny; ++y) {
        if (mu_y[static_cast<std::size_t>(y)] > 0.0) {
            denom += mu_y[static_cast<std::size_t>(y)] * m.qx(x, y, a, xp);
        }
    }
    if (!(denom > kDenominatorFloor)) {
        std::ostringstream os;
        os << "observation x'=" << xp << " has predictive probability " << denom
           << " from x=" << x << " under action " << a;
        throw UnreachableObservation(os.str(), denom);
    }

    std::vector<Atom> out;
    out.reserve(mu.size() * static_cast<std::size_t>(ny));
    for (const Atom& at : mu.atoms()) {
        const double shifted = (at.s + m.cost(x, at.y, a)) / m.beta;
        for (int yp = 0; yp < ny; ++yp) {
            double k = m.trans(x, at.y, a, xp, yp);
            if (k > 0.0) out.push_back({yp, shifted, at.w * k / denom});
        }
    }
    return JointMeasure(std::move(out));
}

FilterTrace filter_trace(const ModelSpec& m, int x0, const std::vector<ObservationStep>& obs) {
    if (x0 < 0 || x0 >= m.num_x()) throw DomainError("initial state index out of range");

    FilterTrace trace;
    trace.xs.push_back(x0);
    trace.measures.push_back(JointMeasure::product_prior(m.q0));

    double z = 1.0;
    for (std::size_t n = 0; n < obs.size(); ++n) {
        const ObservationStep& step = obs[n];
        if (step.next_x < 0 || step.next_x >= m.num_x()) {
            throw DomainError("observed state index out of range");
        }
        try {
            trace.measures.push_back(
                psi_update(m, trace.xs.back(), step.action, step.next_x, trace.measures.back(), z));
        } catch (const UnreachableObservation& e) {
            std::ostringstream os;
            os << e.what() << " (trace step " << n << ")";
            throw UnreachableObservation(os.str(), e.mass, static_cast<int>(n));
        }
        trace.actions.push_back(step.action);
        trace.xs.push_back(step.next_x);
        z *= m.beta;
    }
    return trace;
}

} // namespace rspomdp
