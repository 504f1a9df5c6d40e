#pragma once

#include <string>
#include <vector>

#include "rspomdp/measure.hpp"
#include "rspomdp/model.hpp"

namespace rspomdp {

/// Optimal stopping of i.i.d. offers whose distribution depends on an
/// unknown parameter theta. Waiting one more period costs c_theta (also
/// unknown), so the filter tracks the joint law of (theta, -accumulated
/// cost); rejected offers are gone for good and the offer at the horizon
/// must be accepted. This is a maximization problem and is solved directly
/// by comparing the utility of stopping with the continuation value; no
/// discounting is applied.
struct HouseModel {
    std::vector<std::string> thetas;
    std::vector<double> offer_grid;
    std::vector<std::vector<double>> q_offer; // [theta][offer index]
    std::vector<double> c_theta;              // per-period observation cost, > 0
    std::vector<double> q0;                   // prior over theta
    int horizon = 0;                          // number of future offers still to come
    Utility utility = Utility::linear();      // concave, applied to offer + s

    int num_thetas() const { return static_cast<int>(thetas.size()); }
    int num_offers() const { return static_cast<int>(offer_grid.size()); }
};

/// Shape and stochasticity checks; cost bounds are the extremes of c_theta.
/// A non-concave utility is reported as a violation (the threshold
/// characterization relies on concavity).
ValidationReport validate_house(const HouseModel& h);

/// Filter update on seeing offer index xp: atom (theta, s, w) becomes
/// (theta, s - c_theta, w * q_offer[theta][xp] / denom) with denom the
/// predictive offer probability. Throws UnreachableObservation when denom
/// vanishes. The update does not depend on previously seen offers, so the
/// posterior depends on the history only through the multiset of offers.
JointMeasure stop_update(const HouseModel& h, int xp, const JointMeasure& mu);

/// Utility of accepting offer x now: E[U(x + s)] under mu. The accumulated
/// s is nonpositive, so this nets out the observation costs already paid.
double u_mu(const HouseModel& h, const JointMeasure& mu, double x);

/// The unique x with u_mu(h, mu, x) = v, by bisection to 1e-10 after bracket
/// expansion. Throws OutOfRange when v is outside the range (or numerically
/// unreachable within the expansion budget).
double u_mu_inverse(const HouseModel& h, const JointMeasure& mu, double v);

/// d_n(mu): expected value of rejecting the current offer and acting
/// optimally on the next n offers, the last of which must be accepted:
///   d_n(mu) = sum_xp pred(xp) * max{ u_mu(psi, offer[xp]), d_{n-1}(psi) },
/// psi = stop_update(h, xp, mu), with the inner max dropped at n = 1.
double continuation_value(const HouseModel& h, int n, const JointMeasure& mu);

/// True iff accepting offer x at decision time n (with N - n offers still
/// ahead) is optimal: u_mu(mu, x) >= d_{N-n}(mu), ties accepted. The
/// equivalent threshold form x >= u_mu_inverse(d) is evaluated as a
/// cross-check.
bool decide_stop(const HouseModel& h, int n, const JointMeasure& mu, double x);

/// Value of the whole problem when the first offer is x0: max{accept now,
/// continue} over h.horizon further offers.
double house_value(const HouseModel& h, double x0);

/// One reachable filter node: decision time n, the sorted multiset of offer
/// indices observed since the start (empty at the root; the initial offer
/// never enters the filter), and the reservation level. Offers at or above
/// the threshold are accepted.
struct ReservationRow {
    int n;
    std::vector<int> offers;
    double threshold;
};

struct ReservationTable {
    int horizon = 0;
    std::vector<ReservationRow> rows;
};

/// Thresholds x*(n, mu) = u_mu_inverse(d_{N-n}(mu)) for every reachable
/// node at decision times 0 .. N-1 (at time N acceptance is forced, so no
/// threshold exists). Nodes are enumerated as nondecreasing index sequences;
/// branches of negligible predictive mass are pruned. Throws TooLarge when
/// the node count exceeds 200000.
ReservationTable reservation_levels(const HouseModel& h);

} // namespace rspomdp
