#include "rspomdp/house_selling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rspomdp/solver_finite.hpp"

namespace rspomdp {

namespace {

constexpr int kMaxReservationNodes = 200000;
constexpr double kBisectTol = 1e-10;

std::vector<double> predictive_offer(const HouseModel& h, const JointMeasure& mu) {
    BeliefY nu = marginal_y(mu, h.num_thetas());
    std::vector<double> pred(static_cast<std::size_t>(h.num_offers()), 0.0);
    for (int th = 0; th < h.num_thetas(); ++th) {
        if (nu[th] <= 0.0) continue;
        for (int xp = 0; xp < h.num_offers(); ++xp) {
            pred[static_cast<std::size_t>(xp)] +=
                nu[th] * h.q_offer[static_cast<std::size_t>(th)][static_cast<std::size_t>(xp)];
        }
    }
    return pred;
}

/// Smallest offer value at which every atom of mu lies in U's domain;
/// `open` marks an excluded endpoint.
struct OfferFloor {
    double x;
    bool open;
};

OfferFloor offer_floor(const HouseModel& h, const JointMeasure& mu) {
    switch (h.utility.kind()) {
        case UtilityKind::Log:
            return {-mu.min_s(), true};
        case UtilityKind::Power:
            return {-mu.min_s(), h.utility.gamma() < 0.0};
        default:
            return {-std::numeric_limits<double>::infinity(), false};
    }
}

} // namespace

ValidationReport validate_house(const HouseModel& h) {
    ValidationReport rep;
    auto bad = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

    const int nt = h.num_thetas();
    const int nx = h.num_offers();
    if (nt == 0) bad("model needs at least one theta");
    if (nx == 0) bad("model needs at least one offer value");
    if (h.horizon < 0) bad("horizon must be nonnegative");

    for (int i = 0; i < nt; ++i) {
        if (h.thetas[static_cast<std::size_t>(i)].empty()) bad("theta labels must be nonempty");
        for (int j = i + 1; j < nt; ++j) {
            if (h.thetas[static_cast<std::size_t>(i)] == h.thetas[static_cast<std::size_t>(j)]) {
                bad("duplicate theta label '" + h.thetas[static_cast<std::size_t>(i)] + "'");
            }
        }
    }
    for (double x : h.offer_grid) {
        if (!std::isfinite(x)) bad("offer values must be finite");
    }
    for (std::size_t i = 0; i + 1 < h.offer_grid.size(); ++i) {
        for (std::size_t j = i + 1; j < h.offer_grid.size(); ++j) {
            if (h.offer_grid[i] == h.offer_grid[j]) {
                std::ostringstream os;
                os << "duplicate offer value " << h.offer_grid[i];
                bad(os.str());
                break;
            }
        }
    }

    if (static_cast<int>(h.q_offer.size()) != nt) {
        bad("q_offer must have one row per theta");
    } else {
        for (int th = 0; th < nt; ++th) {
            const auto& row = h.q_offer[static_cast<std::size_t>(th)];
            if (static_cast<int>(row.size()) != nx) {
                bad("q_offer rows must have one entry per offer value");
                continue;
            }
            double sum = 0.0;
            for (double p : row) {
                if (!std::isfinite(p)) bad("offer probabilities must be finite");
                if (p < 0.0) bad("offer probabilities must be nonnegative");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kStochasticTol) {
                std::ostringstream os;
                os << "offer row sum " << sum << " != 1 at theta=" << th;
                bad(os.str());
            }
        }
    }

    if (static_cast<int>(h.c_theta.size()) != nt) {
        bad("c_theta must have one entry per theta");
    } else {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (double c : h.c_theta) {
            if (!std::isfinite(c)) bad("observation costs must be finite");
            if (!(c > 0.0)) bad("observation costs must be > 0");
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        rep.cost_lower = lo;
        rep.cost_upper = hi;
    }

    if (static_cast<int>(h.q0.size()) != nt) {
        bad("prior must have one entry per theta");
    } else {
        double sum = 0.0;
        for (double p : h.q0) {
            if (!std::isfinite(p)) bad("prior entries must be finite");
            if (p < 0.0) bad("prior entries must be nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kStochasticTol) {
            std::ostringstream os;
            os << "prior sums to " << sum << ", expected 1";
            bad(os.str());
        }
    }

    if (!h.utility.is_concave()) {
        bad("utility must be concave for the stopping problem, got " + h.utility.describe());
    }
    return rep;
}

JointMeasure stop_update(const HouseModel& h, int xp, const JointMeasure& mu) {
    if (xp < 0 || xp >= h.num_offers()) throw DomainError("offer index out of range");

    double denom = 0.0;
    for (const Atom& at : mu.atoms()) {
        denom += at.w * h.q_offer[static_cast<std::size_t>(at.y)][static_cast<std::size_t>(xp)];
    }
    if (denom <= 1e-300) {
        std::ostringstream os;
        os << "offer index " << xp << " has predictive probability " << denom;
        throw UnreachableObservation(os.str(), denom);
    }

    std::vector<Atom> out;
    out.reserve(mu.size());
    for (const Atom& at : mu.atoms()) {
        const double k = h.q_offer[static_cast<std::size_t>(at.y)][static_cast<std::size_t>(xp)];
        if (k <= 0.0) continue;
        out.push_back({at.y, at.s - h.c_theta[static_cast<std::size_t>(at.y)], at.w * k / denom});
    }
    return JointMeasure(std::move(out));
}

double u_mu(const HouseModel& h, const JointMeasure& mu, double x) {
    double v = 0.0;
    for (const Atom& at : mu.atoms()) {
        v += at.w * h.utility(x + at.s);
    }
    return v;
}

double u_mu_inverse(const HouseModel& h, const JointMeasure& mu, double v) {
    if (mu.empty()) throw DomainError("measure has no atoms");
    if (!std::isfinite(v)) throw DomainError("target value must be finite");

    const OfferFloor floor = offer_floor(h, mu);
    auto eval = [&h, &mu](double x) { return u_mu(h, mu, x); };

    double lo;
    double hi;
    if (std::isfinite(floor.x)) {
        lo = floor.open ? floor.x + 1.0 : floor.x;
        hi = lo + 1.0;
    } else {
        lo = 0.0;
        hi = 1.0;
    }

    double step = 1.0;
    for (int it = 0; eval(hi) < v; ++it) {
        if (it >= 200) throw OutOfRange("target value is above the reachable utility range");
        hi += step;
        step *= 2.0;
    }
    step = 1.0;
    for (int it = 0; eval(lo) > v; ++it) {
        if (it >= 200) throw OutOfRange("target value is below the reachable utility range");
        if (floor.open) {
            lo = floor.x + (lo - floor.x) / 2.0;
        } else if (std::isfinite(floor.x)) {
            if (lo <= floor.x) throw OutOfRange("target value is below the reachable utility range");
            lo = std::max(floor.x, lo - step);
            step *= 2.0;
        } else {
            lo -= step;
            step *= 2.0;
        }
    }

    while (hi - lo > kBisectTol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // bracket at floating-point resolution
        if (eval(mid) < v) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double continuation_value(const HouseModel& h, int n, const JointMeasure& mu) {
    if (n < 1) throw DomainError("continuation depth must be >= 1");
    const std::vector<double> pred = predictive_offer(h, mu);
    double d = 0.0;
    for (int xp = 0; xp < h.num_offers(); ++xp) {
        const double mass = pred[static_cast<std::size_t>(xp)];
        if (mass < kMassPrune) continue;
        JointMeasure next = stop_update(h, xp, mu);
        double v = u_mu(h, next, h.offer_grid[static_cast<std::size_t>(xp)]);
        if (n > 1) v = std::max(v, continuation_value(h, n - 1, next));
        d += mass * v;
    }
    return d;
}

bool decide_stop(const HouseModel& h, int n, const JointMeasure& mu, double x) {
    if (n < 0 || n >= h.horizon) {
        throw DomainError("decision time must lie strictly before the horizon");
    }
    const double accept = u_mu(h, mu, x);
    const double cont = continuation_value(h, h.horizon - n, mu);
    const bool stop = accept >= cont - 1e-12;

    const double threshold = u_mu_inverse(h, mu, cont);
    const bool stop_by_threshold = x >= threshold - 1e-9;
    if (stop != stop_by_threshold && std::abs(x - threshold) > 1e-8) {
        std::ostringstream os;
        os << "stopping forms disagree away from the threshold: U-form " << stop
           << ", threshold " << threshold << ", offer " << x;
        throw Error("InternalError", os.str());
    }
    return stop;
}

double house_value(const HouseModel& h, double x0) {
    JointMeasure mu0 = JointMeasure::product_prior(h.q0);
    const double accept = u_mu(h, mu0, x0);
    if (h.horizon < 1) return accept;
    return std::max(accept, continuation_value(h, h.horizon, mu0));
}

namespace {

void enumerate_nodes(const HouseModel& h, int n, int min_index, const JointMeasure& mu,
                     std::vector<int>& offers, ReservationTable& table) {
    if (static_cast<int>(table.rows.size()) >= kMaxReservationNodes) {
        throw TooLarge("reservation table exceeds 200000 nodes");
    }
    const double d = continuation_value(h, h.horizon - n, mu);
    table.rows.push_back({n, offers, u_mu_inverse(h, mu, d)});
    if (n + 1 >= h.horizon) return;

    const std::vector<double> pred = predictive_offer(h, mu);
    // Offers are exchangeable given theta, so posteriors depend only on the
    // multiset of indices; nondecreasing sequences enumerate each node once.
    for (int xp = min_index; xp < h.num_offers(); ++xp) {
        if (pred[static_cast<std::size_t>(xp)] < kMassPrune) continue;
        offers.push_back(xp);
        enumerate_nodes(h, n + 1, xp, stop_update(h, xp, mu), offers, table);
        offers.pop_back();
    }
}

} // namespace

ReservationTable reservation_levels(const HouseModel& h) {
    if (h.horizon < 0) throw DomainError("horizon must be nonnegative");
    ReservationTable table;
    table.horizon = h.horizon;
    if (h.horizon == 0) return table;

    std::vector<int> offers;
    enumerate_nodes(h, 0, 0, JointMeasure::product_prior(h.q0), offers, table);
    return table;
}

} // namespace rspomdp
