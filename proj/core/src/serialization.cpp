#include "rspomdp/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rspomdp {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidFile("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw InvalidFile("read failure on '" + path + "'");
    return os.str();
}

namespace {

json parse_checked(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidFile(std::string("malformed JSON: ") + e.what());
    }
}

const json& member(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw InvalidFile(std::string("missing field '") + key + "'");
    return *it;
}

double finite_number(const json& j, const std::string& what) {
    if (!j.is_number()) throw InvalidFile(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw InvalidFile(what + " must be finite");
    return v;
}

std::vector<double> number_array(const json& j, const std::string& what) {
    if (!j.is_array()) throw InvalidFile(what + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(finite_number(v, what + " entry"));
    return out;
}

std::vector<std::string> label_array(const json& j, const std::string& what) {
    if (!j.is_array()) throw InvalidFile(what + " must be an array");
    std::vector<std::string> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_string()) throw InvalidFile(what + " entries must be strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

int label_index(const std::vector<std::string>& labels, const std::string& label,
                const std::string& what) {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw InvalidFile("unknown " + what + " '" + label + "'");
    return static_cast<int>(it - labels.begin());
}

/// An admissible-set entry, a policy action, or a CLI state may be given as
/// a label or as a plain index.
int label_or_index(const json& j, const std::vector<std::string>& labels,
                   const std::string& what) {
    if (j.is_string()) return label_index(labels, j.get<std::string>(), what);
    if (j.is_number_integer()) {
        const int idx = j.get<int>();
        if (idx < 0 || idx >= static_cast<int>(labels.size())) {
            throw InvalidFile(what + " index " + std::to_string(idx) + " out of range");
        }
        return idx;
    }
    throw InvalidFile(what + " must be a label or an index");
}

Utility utility_from_json(const json& j) {
    if (!j.is_object()) throw InvalidFile("utility must be an object");
    const json& var = member(j, "variant");
    if (!var.is_string()) throw InvalidFile("utility variant must be a string");
    const std::string variant = var.get<std::string>();
    try {
        if (variant == "linear") return Utility::linear();
        if (variant == "exponential") {
            return Utility::exponential(finite_number(member(j, "gamma"), "gamma"));
        }
        if (variant == "power") {
            return Utility::power(finite_number(member(j, "gamma"), "gamma"));
        }
        if (variant == "log") return Utility::log();
        if (variant == "piecewise_linear_concave") {
            const json& bps = member(j, "breakpoints");
            if (!bps.is_array()) throw InvalidFile("breakpoints must be an array");
            std::vector<std::pair<double, double>> points;
            for (const auto& bp : bps) {
                if (!bp.is_array() || bp.size() != 2) {
                    throw InvalidFile("each breakpoint must be a [x, u] pair");
                }
                points.emplace_back(finite_number(bp[0], "breakpoint x"),
                                    finite_number(bp[1], "breakpoint u"));
            }
            return Utility::piecewise_linear_concave(std::move(points));
        }
    } catch (const DomainError& e) {
        throw InvalidFile(std::string("bad utility parameters: ") + e.what());
    }
    throw InvalidFile("unknown utility variant '" + variant + "'");
}

json utility_to_json(const Utility& u) {
    json j;
    switch (u.kind()) {
        case UtilityKind::Linear:
            j["variant"] = "linear";
            break;
        case UtilityKind::Exponential:
            j["variant"] = "exponential";
            j["gamma"] = u.gamma();
            break;
        case UtilityKind::Power:
            j["variant"] = "power";
            j["gamma"] = u.gamma();
            break;
        case UtilityKind::Log:
            j["variant"] = "log";
            break;
        case UtilityKind::PiecewiseLinearConcave: {
            j["variant"] = "piecewise_linear_concave";
            json bps = json::array();
            for (const auto& [x, ux] : u.breakpoints()) bps.push_back(json::array({x, ux}));
            j["breakpoints"] = std::move(bps);
            break;
        }
    }
    return j;
}

json policy_node_to_json(const ModelSpec& m, const PolicyNode* node) {
    if (node == nullptr || node->action < 0) return nullptr;
    json j;
    j["action"] = m.actions[static_cast<std::size_t>(node->action)];
    json children = json::object();
    for (const auto& [xp, child] : node->children) {
        children[m.x_states[static_cast<std::size_t>(xp)]] = policy_node_to_json(m, child.get());
    }
    j["children"] = std::move(children);
    return j;
}

std::unique_ptr<PolicyNode> policy_node_from_json(const ModelSpec& m, const json& j) {
    auto node = std::make_unique<PolicyNode>();
    if (j.is_null()) return node; // past the last decision
    if (!j.is_object()) throw InvalidFile("policy node must be an object or null");
    node->action = label_or_index(member(j, "action"), m.actions, "action");
    auto it = j.find("children");
    if (it != j.end()) {
        if (!it->is_object()) throw InvalidFile("policy children must be an object");
        for (const auto& [key, sub] : it->items()) {
            const int xp = label_index(m.x_states, key, "state");
            node->children.emplace(xp, policy_node_from_json(m, sub));
        }
    }
    return node;
}

} // namespace

ModelSpec model_from_json_text(const std::string& text) {
    const json j = parse_checked(text);
    if (!j.is_object()) throw InvalidFile("model document must be a JSON object");

    ModelSpec m;
    m.x_states = label_array(member(j, "x_states"), "x_states");
    m.y_states = label_array(member(j, "y_states"), "y_states");
    m.actions = label_array(member(j, "actions"), "actions");
    const int nx = m.num_x();
    const int ny = m.num_y();
    const int na = m.num_a();
    if (nx == 0 || ny == 0 || na == 0) {
        throw InvalidFile("state and action lists must be nonempty");
    }

    const json& adm = member(j, "admissible");
    if (!adm.is_array() || static_cast<int>(adm.size()) != nx) {
        throw InvalidFile("admissible must list one action set per observable state");
    }
    for (const auto& row : adm) {
        if (!row.is_array()) throw InvalidFile("admissible entries must be arrays");
        std::vector<int> set;
        for (const auto& v : row) set.push_back(label_or_index(v, m.actions, "action"));
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        m.admissible.push_back(std::move(set));
    }

    const json& q = member(j, "q");
    if (!q.is_array() || static_cast<int>(q.size()) != nx) {
        throw InvalidFile("q must be nested [x][y][a][x'][y']");
    }
    m.q.reserve(static_cast<std::size_t>(nx) * ny * na * nx * ny);
    for (const auto& jx : q) {
        if (!jx.is_array() || static_cast<int>(jx.size()) != ny) throw InvalidFile("q[x] must have one row per y");
        for (const auto& jy : jx) {
            if (!jy.is_array() || static_cast<int>(jy.size()) != na) throw InvalidFile("q[x][y] must have one row per action");
            for (const auto& ja : jy) {
                if (!ja.is_array() || static_cast<int>(ja.size()) != nx) throw InvalidFile("q[x][y][a] must have one row per successor x'");
                for (const auto& jxp : ja) {
                    std::vector<double> row = number_array(jxp, "q row");
                    if (static_cast<int>(row.size()) != ny) throw InvalidFile("q[x][y][a][x'] must have one entry per y'");
                    m.q.insert(m.q.end(), row.begin(), row.end());
                }
            }
        }
    }

    const json& c = member(j, "c");
    if (!c.is_array() || static_cast<int>(c.size()) != nx) throw InvalidFile("c must be nested [x][y][a]");
    for (const auto& jx : c) {
        if (!jx.is_array() || static_cast<int>(jx.size()) != ny) throw InvalidFile("c[x] must have one row per y");
        for (const auto& jy : jx) {
            std::vector<double> row = number_array(jy, "c row");
            if (static_cast<int>(row.size()) != na) throw InvalidFile("c[x][y] must have one entry per action");
            m.c.insert(m.c.end(), row.begin(), row.end());
        }
    }

    m.beta = finite_number(member(j, "beta"), "beta");
    m.q0 = number_array(member(j, "q0"), "q0");
    if (static_cast<int>(m.q0.size()) != ny) throw InvalidFile("q0 must have one entry per hidden state");
    m.utility = utility_from_json(member(j, "utility"));
    return m;
}

std::string model_to_json_text(const ModelSpec& m) {
    json j;
    j["x_states"] = m.x_states;
    j["y_states"] = m.y_states;
    j["actions"] = m.actions;

    json adm = json::array();
    for (const auto& set : m.admissible) {
        json row = json::array();
        for (int a : set) row.push_back(m.actions[static_cast<std::size_t>(a)]);
        adm.push_back(std::move(row));
    }
    j["admissible"] = std::move(adm);

    const int nx = m.num_x();
    const int ny = m.num_y();
    const int na = m.num_a();
    json q = json::array();
    for (int x = 0; x < nx; ++x) {
        json jx = json::array();
        for (int y = 0; y < ny; ++y) {
            json jy = json::array();
            for (int a = 0; a < na; ++a) {
                json ja = json::array();
                for (int xp = 0; xp < nx; ++xp) {
                    json row = json::array();
                    for (int yp = 0; yp < ny; ++yp) row.push_back(m.trans(x, y, a, xp, yp));
                    ja.push_back(std::move(row));
                }
                jy.push_back(std::move(ja));
            }
            jx.push_back(std::move(jy));
        }
        q.push_back(std::move(jx));
    }
    j["q"] = std::move(q);

    json c = json::array();
    for (int x = 0; x < nx; ++x) {
        json jx = json::array();
        for (int y = 0; y < ny; ++y) {
            json jy = json::array();
            for (int a = 0; a < na; ++a) jy.push_back(m.cost(x, y, a));
            jx.push_back(std::move(jy));
        }
        c.push_back(std::move(jx));
    }
    j["c"] = std::move(c);

    j["beta"] = m.beta;
    j["q0"] = m.q0;
    j["utility"] = utility_to_json(m.utility);
    return j.dump(2);
}

ModelSpec load_model(const std::string& path) {
    return model_from_json_text(read_text_file(path));
}

HouseModel house_from_json_text(const std::string& text) {
    const json j = parse_checked(text);
    if (!j.is_object()) throw InvalidFile("stopping-model document must be a JSON object");

    HouseModel h;
    h.thetas = label_array(member(j, "thetas"), "thetas");
    h.offer_grid = number_array(member(j, "offer_grid"), "offer_grid");
    const int nt = h.num_thetas();
    const int nx = h.num_offers();
    if (nt == 0 || nx == 0) throw InvalidFile("thetas and offer_grid must be nonempty");

    const json& qo = member(j, "q_offer");
    if (!qo.is_array() || static_cast<int>(qo.size()) != nt) {
        throw InvalidFile("q_offer must have one row per theta");
    }
    for (const auto& row : qo) {
        std::vector<double> r = number_array(row, "q_offer row");
        if (static_cast<int>(r.size()) != nx) {
            throw InvalidFile("q_offer rows must have one entry per offer");
        }
        h.q_offer.push_back(std::move(r));
    }

    h.c_theta = number_array(member(j, "c_theta"), "c_theta");
    if (static_cast<int>(h.c_theta.size()) != nt) throw InvalidFile("c_theta must have one entry per theta");
    h.q0 = number_array(member(j, "q0"), "q0");
    if (static_cast<int>(h.q0.size()) != nt) throw InvalidFile("q0 must have one entry per theta");
    h.utility = utility_from_json(member(j, "utility"));
    return h;
}

std::string house_to_json_text(const HouseModel& h) {
    json j;
    j["thetas"] = h.thetas;
    j["offer_grid"] = h.offer_grid;
    j["q_offer"] = h.q_offer;
    j["c_theta"] = h.c_theta;
    j["q0"] = h.q0;
    j["utility"] = utility_to_json(h.utility);
    return j.dump(2);
}

HouseModel load_house(const std::string& path) {
    return house_from_json_text(read_text_file(path));
}

JointMeasure measure_from_json_text(const std::string& text) {
    const json j = parse_checked(text);
    if (!j.is_object()) throw InvalidFile("measure document must be a JSON object");
    const json& atoms = member(j, "atoms");
    if (!atoms.is_array()) throw InvalidFile("atoms must be an array");
    std::vector<Atom> out;
    for (const auto& a : atoms) {
        if (!a.is_array() || a.size() != 3) throw InvalidFile("each atom must be [y, s, w]");
        if (!a[0].is_number_integer()) throw InvalidFile("atom y must be an integer index");
        out.push_back({a[0].get<int>(), finite_number(a[1], "atom s"), finite_number(a[2], "atom w")});
    }
    try {
        return JointMeasure(std::move(out));
    } catch (const DomainError& e) {
        throw InvalidFile(std::string("bad measure: ") + e.what());
    }
}

std::string measure_to_json_text(const JointMeasure& mu) {
    json atoms = json::array();
    for (const Atom& at : mu.atoms()) atoms.push_back(json::array({at.y, at.s, at.w}));
    json j;
    j["atoms"] = std::move(atoms);
    return j.dump();
}

std::string policy_to_json_text(const ModelSpec& m, const PolicyTree& tree) {
    json j;
    j["x0"] = m.x_states[static_cast<std::size_t>(tree.x0)];
    j["horizon"] = tree.horizon;
    j["tree"] = policy_node_to_json(m, tree.root.get());
    return j.dump(2);
}

PolicyTree policy_from_json_text(const ModelSpec& m, const std::string& text, int want_x0) {
    const json top = parse_checked(text);
    if (!top.is_object()) throw InvalidFile("policy document must be a JSON object");

    const json* doc = &top;
    json picked;
    if (top.contains("policy")) {
        // a solver output file wrapping one policy per root
        const json& arr = member(top, "policy");
        if (!arr.is_array() || arr.empty()) throw InvalidFile("policy field must be a nonempty array");
        if (want_x0 < 0) {
            if (arr.size() != 1) {
                throw InvalidFile("output file holds several policies; select a root state");
            }
            picked = arr[0];
        } else {
            const std::string& want = m.x_states[static_cast<std::size_t>(want_x0)];
            bool found = false;
            for (const auto& cand : arr) {
                if (cand.is_object() && cand.contains("x0") && cand["x0"].is_string() &&
                    cand["x0"].get<std::string>() == want) {
                    picked = cand;
                    found = true;
                    break;
                }
            }
            if (!found) throw InvalidFile("no policy for root state '" + want + "' in the file");
        }
        doc = &picked;
    }

    PolicyTree tree;
    tree.x0 = label_or_index(member(*doc, "x0"), m.x_states, "state");
    if (want_x0 >= 0 && tree.x0 != want_x0) {
        throw InvalidFile("policy was computed for root state '" +
                          m.x_states[static_cast<std::size_t>(tree.x0)] + "'");
    }
    const json& hor = member(*doc, "horizon");
    if (!hor.is_number_integer()) throw InvalidFile("horizon must be an integer");
    tree.horizon = hor.get<int>();
    if (tree.horizon < 0) throw InvalidFile("horizon must be nonnegative");
    tree.root = policy_node_from_json(m, member(*doc, "tree"));
    return tree;
}

PolicyTree load_policy(const ModelSpec& m, const std::string& path, int want_x0) {
    return policy_from_json_text(m, read_text_file(path), want_x0);
}

Utility utility_from_json_text(const std::string& text) {
    return utility_from_json(parse_checked(text));
}

std::string utility_to_json_text(const Utility& u) {
    return utility_to_json(u).dump();
}

std::string validation_to_json_text(const ValidationReport& rep) {
    json j;
    j["ok"] = rep.ok();
    j["violations"] = rep.violations;
    j["cost_lower"] = rep.cost_lower;
    j["cost_upper"] = rep.cost_upper;
    return j.dump(2);
}

std::string reservation_csv(const HouseModel& h, const ReservationTable& table) {
    std::ostringstream os;
    os << "n,node,threshold\n";
    for (const ReservationRow& row : table.rows) {
        os << row.n << ",";
        for (std::size_t i = 0; i < row.offers.size(); ++i) {
            if (i > 0) os << ";";
            os << format_double(h.offer_grid[static_cast<std::size_t>(row.offers[i])]);
        }
        os << "," << format_double(row.threshold) << "\n";
    }
    return os.str();
}

std::string error_to_json_text(const Error& e) {
    json j;
    j["error"] = e.name();
    j["message"] = e.what();
    return j.dump();
}

} // namespace rspomdp
