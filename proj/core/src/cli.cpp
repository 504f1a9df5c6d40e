#include "rspomdp/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "rspomdp/filter.hpp"
#include "rspomdp/house_selling.hpp"
#include "rspomdp/serialization.hpp"
#include "rspomdp/simulate.hpp"
#include "rspomdp/solver_exp.hpp"
#include "rspomdp/solver_finite.hpp"
#include "rspomdp/solver_infinite.hpp"
#include "rspomdp/solver_power.hpp"

namespace rspomdp {

namespace {

using nlohmann::json;

void emit_error(std::ostream& err, const Error& e) {
    err << error_to_json_text(e) << "\n";
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

int resolve_index(const std::vector<std::string>& labels, const std::string& token,
                  const std::string& what) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == token) return static_cast<int>(i);
    }
    try {
        std::size_t pos = 0;
        const int idx = std::stoi(token, &pos);
        if (pos == token.size() && idx >= 0 && idx < static_cast<int>(labels.size())) return idx;
    } catch (const std::exception&) {
    }
    throw DomainError("unknown " + what + " '" + token + "'");
}

ModelSpec load_validated_model(const RunConfig& cfg, bool for_infinite_horizon) {
    if (cfg.model_path.empty()) throw DomainError("a model file is required");
    ModelSpec m = load_model(cfg.model_path);
    const ValidationReport rep = validate(m, for_infinite_horizon);
    if (!rep.ok()) {
        std::ostringstream os;
        os << "model failed validation: " << rep.violations.front();
        if (rep.violations.size() > 1) os << " (and " << rep.violations.size() - 1 << " more)";
        throw Error("InvalidModel", os.str());
    }
    return m;
}

void write_output(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    std::string payload = text;
    if (payload.empty() || payload.back() != '\n') payload += '\n';
    if (cfg.output.empty() || cfg.output == "-") {
        out << payload;
        return;
    }
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) throw InvalidFile("cannot open '" + cfg.output + "' for writing");
    f << payload;
    f.flush();
    if (!f) throw InvalidFile("write failure on '" + cfg.output + "'");
}

std::vector<ObservationStep> parse_obs(const ModelSpec& m, const std::string& text) {
    std::vector<ObservationStep> steps;
    if (trim(text).empty()) return steps;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        const std::size_t comma = part.find(',');
        if (comma == std::string::npos) {
            throw DomainError("observation steps look like 'action,state', got '" + part + "'");
        }
        const std::string atok = trim(part.substr(0, comma));
        const std::string xtok = trim(part.substr(comma + 1));
        steps.push_back({resolve_index(m.actions, atok, "action"),
                         resolve_index(m.x_states, xtok, "state")});
    }
    return steps;
}

int run_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    bool ok = false;
    try {
        if (cfg.model_path.empty()) throw DomainError("a model file is required");
        const std::string text = read_text_file(cfg.model_path);
        ValidationReport rep;
        try {
            rep = validate(model_from_json_text(text));
        } catch (const InvalidFile& model_error) {
            try {
                rep = validate_house(house_from_json_text(text));
            } catch (const InvalidFile&) {
                throw model_error; // neither schema matched; report the primary one
            }
        }
        ok = rep.ok();
        write_output(cfg, out, validation_to_json_text(rep));
    } catch (const Error& e) {
        emit_error(err, e);
        return 2;
    }
    return ok ? 0 : 2;
}

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    ModelSpec m;
    int x0 = -1;
    try {
        m = load_validated_model(cfg, false);
        if (cfg.total_cost) m.beta = 1.0;
        if (cfg.horizon < 1) throw DomainError("horizon must be >= 1");
        if (cfg.fast_exp && cfg.fast_power) {
            throw DomainError("--fast-exp and --fast-power are mutually exclusive");
        }
        if (cfg.fast_exp && m.utility.kind() != UtilityKind::Exponential) {
            throw WrongUtility("--fast-exp requires an exponential utility, model has " +
                               m.utility.describe());
        }
        if (cfg.fast_power && m.utility.kind() != UtilityKind::Power) {
            throw WrongUtility("--fast-power requires a power utility, model has " +
                               m.utility.describe());
        }
        if (!cfg.x0.empty()) x0 = resolve_index(m.x_states, cfg.x0, "state");
    } catch (const Error& e) {
        emit_error(err, e);
        return 2;
    }

    try {
        auto solve_one = [&](int x) {
            if (cfg.fast_exp) return solve_finite_exp(m, cfg.horizon, x);
            if (cfg.fast_power) return solve_finite_power(m, cfg.horizon, x);
            return solve_finite(m, cfg.horizon, x);
        };
        std::vector<RootSolution> roots;
        if (x0 >= 0) {
            roots.push_back(std::move(solve_one(x0).roots.front()));
        } else {
            for (int x = 0; x < m.num_x(); ++x) {
                roots.push_back(std::move(solve_one(x).roots.front()));
            }
        }

        json j;
        j["horizon"] = cfg.horizon;
        json xs = json::array();
        json values = json::array();
        json ces = json::array();
        json policies = json::array();
        for (const RootSolution& r : roots) {
            xs.push_back(m.x_states[static_cast<std::size_t>(r.x0)]);
            values.push_back(r.value);
            ces.push_back(r.certainty_equivalent);
            policies.push_back(json::parse(policy_to_json_text(m, r.policy)));
        }
        j["x0"] = std::move(xs);
        j["values"] = std::move(values);
        j["certainty_equivalents"] = std::move(ces);
        j["policy"] = std::move(policies);
        write_output(cfg, out, j.dump(2));
    } catch (const Error& e) {
        emit_error(err, e);
        return 3;
    }
    return 0;
}

int run_solve_inf(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    ModelSpec m;
    int x0 = -1;
    try {
        m = load_validated_model(cfg, true);
        if (cfg.total_cost) throw DomainError("--total-cost conflicts with infinite-horizon solving");
        if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) {
            throw DomainError("gap tolerance must be positive");
        }
        if (cfg.fast_exp && m.utility.kind() != UtilityKind::Exponential) {
            throw WrongUtility("--fast-exp requires an exponential utility, model has " +
                               m.utility.describe());
        }
        if (cfg.fast_power) throw DomainError("--fast-power has no infinite-horizon mode");
        if (cfg.x0.empty()) throw DomainError("a root state (--x0) is required");
        x0 = resolve_index(m.x_states, cfg.x0, "state");
    } catch (const Error& e) {
        emit_error(err, e);
        return 2;
    }

    try {
        const InfiniteResult r =
            cfg.fast_exp ? solve_infinite_exp(m, x0, cfg.eps) : solve_infinite(m, x0, cfg.eps);
        json j;
        j["lower"] = r.lower;
        j["upper"] = r.upper;
        j["gap"] = r.gap;
        j["horizon"] = r.horizon;
        j["root_action"] = m.actions[static_cast<std::size_t>(r.root_action)];
        j["x0"] = m.x_states[static_cast<std::size_t>(x0)];
        write_output(cfg, out, j.dump(2));
    } catch (const Error& e) {
        emit_error(err, e);
        return 3;
    }
    return 0;
}

int run_filter(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    ModelSpec m;
    int x0 = -1;
    std::vector<ObservationStep> steps;
    try {
        m = load_validated_model(cfg, false);
        if (cfg.x0.empty()) throw DomainError("an initial state (--x0) is required");
        x0 = resolve_index(m.x_states, cfg.x0, "state");
        steps = parse_obs(m, cfg.obs);
    } catch (const Error& e) {
        emit_error(err, e);
        return 2;
    }

    try {
        const FilterTrace tr = filter_trace(m, x0, steps);
        std::ostringstream os;
        for (std::size_t k = 0; k < tr.measures.size(); ++k) {
            json line;
            line["step"] = static_cast<int>(k);
            if (k > 0) {
                line["action"] = m.actions[static_cast<std::size_t>(tr.actions[k - 1])];
            }
            line["x"] = m.x_states[static_cast<std::size_t>(tr.xs[k])];
            line["measure"] = json::parse(measure_to_json_text(tr.measures[k]));
            os << line.dump() << "\n";
        }
        write_output(cfg, out, os.str());
    } catch (const Error& e) {
        emit_error(err, e);
        return 3;
    }
    return 0;
}

int run_house(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    HouseModel h;
    bool have_x0 = false;
    double x0 = 0.0;
    std::string fmt;
    try {
        if (cfg.model_path.empty()) throw DomainError("a model file is required");
        h = load_house(cfg.model_path);
        if (cfg.horizon < 0) throw DomainError("a horizon (--horizon) is required");
        h.horizon = cfg.horizon;
        const ValidationReport rep = validate_house(h);
        if (!rep.ok()) {
            throw Error("InvalidModel", "model failed validation: " + rep.violations.front());
        }
        if (!cfg.x0.empty()) {
            try {
                std::size_t pos = 0;
                x0 = std::stod(cfg.x0, &pos);
                if (pos != cfg.x0.size() || !std::isfinite(x0)) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw DomainError("the initial offer must be a finite number, got '" + cfg.x0 +
                                  "'");
            }
            have_x0 = true;
        }
        fmt = cfg.format.empty() ? "csv" : cfg.format;
        if (fmt != "csv" && fmt != "json") throw DomainError("format must be json or csv");
    } catch (const Error& e) {
        emit_error(err, e);
        return 2;
    }

    try {
        const ReservationTable table = reservation_levels(h);

        json value_part;
        if (have_x0) {
            value_part["x0"] = x0;
            value_part["value"] = house_value(h, x0);
        } else {
            value_part["offer_grid"] = h.offer_grid;
            json vals = json::array();
            for (double offer : h.offer_grid) vals.push_back(house_value(h, offer));
            value_part["values"] = std::move(vals);
        }

        if (fmt == "json") {
            json j = value_part;
            j["horizon"] = h.horizon;
            json rows = json::array();
            for (const ReservationRow& row : table.rows) {
                json r;
                r["n"] = row.n;
                json offers = json::array();
                for (int idx : row.offers) {
                    offers.push_back(h.offer_grid[static_cast<std::size_t>(idx)]);
                }
                r["offers"] = std::move(offers);
                r["threshold"] = row.threshold;
                rows.push_back(std::move(r));
            }
            j["reservations"] = std::move(rows);
            write_output(cfg, out, j.dump(2));
        } else {
            std::ostringstream os;
            os << value_part.dump() << "\n" << reservation_csv(h, table);
            write_output(cfg, out, os.str());
        }
    } catch (const Error& e) {
        emit_error(err, e);
        return 3;
    }
    return 0;
}

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    ModelSpec m;
    PolicyTree pol;
    int x0 = -1;
    int n = -1;
    try {
        m = load_validated_model(cfg, false);
        if (cfg.policy_path.empty()) throw DomainError("a policy file (--policy) is required");
        int want = -1;
        if (!cfg.x0.empty()) want = resolve_index(m.x_states, cfg.x0, "state");
        pol = load_policy(m, cfg.policy_path, want);
        x0 = want >= 0 ? want : pol.x0;
        n = cfg.horizon >= 0 ? cfg.horizon : pol.horizon;
        if (n > pol.horizon) {
            throw DomainError("horizon exceeds the policy depth of " +
                              std::to_string(pol.horizon));
        }
        if (cfg.samples < 1) throw DomainError("need at least one sample");
    } catch (const Error& e) {
        emit_error(err, e);
        return 2;
    }

    try {
        const MonteCarloResult r = monte_carlo(m, pol, n, x0, cfg.samples, cfg.seed);
        json j;
        j["mean"] = r.mean;
        j["ci_halfwidth"] = r.ci_halfwidth;
        j["samples"] = r.samples;
        j["seed"] = r.seed;
        j["horizon"] = n;
        j["x0"] = m.x_states[static_cast<std::size_t>(x0)];
        write_output(cfg, out, j.dump(2));
    } catch (const Error& e) {
        emit_error(err, e);
        return 3;
    }
    return 0;
}

} // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.command == "validate") return run_validate(cfg, out, err);
        if (cfg.command == "solve") return run_solve(cfg, out, err);
        if (cfg.command == "solve-inf") return run_solve_inf(cfg, out, err);
        if (cfg.command == "filter") return run_filter(cfg, out, err);
        if (cfg.command == "house") return run_house(cfg, out, err);
        if (cfg.command == "simulate") return run_simulate(cfg, out, err);
        throw DomainError("unknown command '" + cfg.command + "'");
    } catch (const Error& e) {
        emit_error(err, e);
        return 2;
    }
}

} // namespace rspomdp
