#pragma once

#include <string>

#include "rspomdp/house_selling.hpp"
#include "rspomdp/measure.hpp"
#include "rspomdp/model.hpp"
#include "rspomdp/solver_finite.hpp"

namespace rspomdp {

/// Shortest decimal form that parses back to exactly the same double. Used
/// for all CSV output; the JSON writer emits numbers the same way.
std::string format_double(double v);

/// Model document: {x_states, y_states, actions, admissible, q, c, beta,
/// q0, utility}. q is nested [x][y][a][x'][y'], c is [x][y][a], admissible
/// holds one array of action labels (or indices) per observable state.
/// Numbers must be finite; structural problems raise InvalidFile. Loading
/// checks structure only; run validate() for the stochasticity checks.
ModelSpec model_from_json_text(const std::string& text);
std::string model_to_json_text(const ModelSpec& m);
ModelSpec load_model(const std::string& path);

/// Stopping-problem document: {thetas, offer_grid, q_offer, c_theta, q0,
/// utility}. The horizon is not part of the file; callers set it.
HouseModel house_from_json_text(const std::string& text);
std::string house_to_json_text(const HouseModel& h);
HouseModel load_house(const std::string& path);

/// Measure document: {"atoms": [[y, s, w], ...]} in canonical order.
JointMeasure measure_from_json_text(const std::string& text);
std::string measure_to_json_text(const JointMeasure& mu);

/// Policy document: {"x0": label, "horizon": N, "tree": node} where node is
/// {"action": label, "children": {successor label: node or null}} and null
/// marks nodes past the last decision. Solver output files (which carry a
/// "policy" array) are accepted too; want_x0 >= 0 selects the root when the
/// array has several entries.
std::string policy_to_json_text(const ModelSpec& m, const PolicyTree& tree);
PolicyTree policy_from_json_text(const ModelSpec& m, const std::string& text, int want_x0 = -1);
PolicyTree load_policy(const ModelSpec& m, const std::string& path, int want_x0 = -1);

/// Utility fragment shared by both model documents:
/// {"variant": ..., "gamma"?: ..., "breakpoints"?: [[x, u], ...]}.
Utility utility_from_json_text(const std::string& text);
std::string utility_to_json_text(const Utility& u);

std::string validation_to_json_text(const ValidationReport& rep);

/// One row per reachable node: n, the offer multiset as ';'-joined offer
/// values (empty at the root), and the reservation level.
std::string reservation_csv(const HouseModel& h, const ReservationTable& table);

/// {"error": stable name, "message": human text}.
std::string error_to_json_text(const Error& e);

std::string read_text_file(const std::string& path); // InvalidFile on failure

} // namespace rspomdp
