#include "refauction/io.hpp"

#include "refauction/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace refauction {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ValidationError(where + ": " + what);
}

std::string line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        fail(where, std::string("missing field '") + key + "'");
    }
    return *it;
}

std::string rewarded(const Outcome& o) {
    std::vector<std::pair<AgentId, Money>> entries;
    if (o.winning_path()) {
        for (const AgentId& id : o.winning_path()->agents) {
            const Money p = o.payment(id);
            if (p.is_negative()) {
                entries.emplace_back(id, p);
            }
        }
    }
    for (const auto& [id, p] : o.payments()) {
        if (p.is_negative() && std::none_of(entries.begin(), entries.end(),
                                            [&](const auto& e) { return e.first == id; })) {
            entries.emplace_back(id, p);
        }
    }
    if (entries.empty()) {
        return "-";
    }
    std::string out;
    for (const auto& [id, p] : entries) {
        if (!out.empty()) {
            out += ", ";
        }
        out += id.str() + "(" + p.to_string() + ")";
    }
    return out;
}

}  // namespace

Profile profile_from_json(const Json& doc) {
    if (!doc.is_object()) {
        fail("$", "expected an object");
    }
    const Json& version = field(doc, "schema_version", "$");
    if (!version.is_number_integer() || version.get<long long>() != 1) {
        fail("schema_version", "unsupported value " + version.dump() + " (expected 1)");
    }
    const Json& seller = field(doc, "seller", "$");
    if (!seller.is_string() || seller.get<std::string>().empty()) {
        fail("seller", "expected a non-empty string");
    }
    const Json& agents = field(doc, "agents", "$");
    if (!agents.is_array()) {
        fail("agents", "expected an array");
    }

    Profile profile;
    profile.seller = AgentId(seller.get<std::string>());
    for (std::size_t k = 0; k < agents.size(); ++k) {
        const std::string where = "agents[" + std::to_string(k) + "]";
        const Json& a = agents[k];
        if (!a.is_object()) {
            fail(where, "expected an object");
        }
        const Json& id = field(a, "id", where);
        if (!id.is_string() || id.get<std::string>().empty()) {
            fail(where + ".id", "expected a non-empty string");
        }
        const Json& val = field(a, "valuation", where);
        if (!val.is_string()) {
            fail(where + ".valuation", "expected a decimal string, got " + val.dump());
        }
        AgentType type;
        try {
            type.valuation = Money::parse(val.get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(where + ".valuation", e.what());
        }
        if (type.valuation.is_negative()) {
            fail(where + ".valuation", "negative valuation " + type.valuation.to_string());
        }
        if (auto c = a.find("children"); c != a.end()) {
            if (!c->is_array()) {
                fail(where + ".children", "expected an array");
            }
            for (std::size_t j = 0; j < c->size(); ++j) {
                if (!(*c)[j].is_string()) {
                    fail(where + ".children[" + std::to_string(j) + "]", "expected a string id");
                }
                if (!type.children.insert(AgentId((*c)[j].get<std::string>())).second) {
                    fail(where + ".children[" + std::to_string(j) + "]",
                         "duplicate child '" + (*c)[j].get<std::string>() + "'");
                }
            }
        }
        AgentId key(id.get<std::string>());
        if (!profile.entries.emplace(key, std::move(type)).second) {
            fail(where + ".id", "duplicate agent id '" + key.str() + "'");
        }
    }
    for (std::size_t k = 0; k < agents.size(); ++k) {
        const AgentId id(agents[k]["id"].get<std::string>());
        for (const AgentId& c : profile.entries.at(id).children) {
            if (!profile.contains(c)) {
                fail("agents[" + std::to_string(k) + "].children",
                     "'" + id.str() + "' lists undeclared child '" + c.str() + "'");
            }
        }
    }
    if (!profile.contains(profile.seller)) {
        fail("agents", "seller '" + profile.seller.str() + "' is not listed");
    }
    profile.validate();
    return profile;
}

Profile parse_network_file(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ValidationError("syntax error at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
    return profile_from_json(doc);
}

Profile load_network_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(path + ": cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_network_file(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

Json profile_to_json(const Profile& profile) {
    Json agents = Json::array();
    for (const auto& [id, type] : profile.entries) {
        Json children = Json::array();
        for (const AgentId& c : type.children) {
            children.push_back(c.str());
        }
        agents.push_back(Json{{"id", id.str()}, {"valuation", type.valuation.to_string()}, {"children", children}});
    }
    return Json{{"schema_version", 1}, {"seller", profile.seller.str()}, {"agents", agents}};
}

std::string serialize_network_file(const Profile& profile) { return profile_to_json(profile).dump(2) + "\n"; }

Json outcome_to_json(const Outcome& outcome) {
    Json payments = Json::object();
    for (const auto& [id, p] : outcome.payments()) {
        payments[id.str()] = p.to_string();
    }
    Json path = nullptr;
    if (outcome.winning_path()) {
        path = Json::array();
        for (const AgentId& id : outcome.winning_path()->agents) {
            path.push_back(id.str());
        }
    }
    return Json{{"mechanism", std::string(mechanism_name(outcome.mechanism()))},
                {"winner", outcome.winner() ? Json(outcome.winner()->str()) : Json(nullptr)},
                {"payments", payments},
                {"revenue", outcome.revenue().to_string()},
                {"social_welfare", outcome.social_welfare().to_string()},
                {"path", path}};
}

Json deviation_to_json(const DeviationResult& r) {
    Json deviators = Json::array();
    for (const AgentId& id : r.deviators) {
        deviators.push_back(id.str());
    }
    Json owned = Json::array();
    for (const AgentId& id : r.owned) {
        owned.push_back(id.str());
    }
    return Json{{"kind", std::string(deviation_kind_name(r.kind))},
                {"found", r.found},
                {"deviators", deviators},
                {"description", r.description},
                {"owned", owned},
                {"item_value", r.item_value.to_string()},
                {"baseline_utility", r.baseline_utility.to_string()},
                {"deviated_utility", r.deviated_utility.to_string()},
                {"gain", r.gain.to_string()},
                {"evaluations", r.evaluations},
                {"truncated", r.truncated},
                {"bounds", r.bounds},
                {"deviated_reports", profile_to_json(r.deviated_reports)}};
}

std::string render_table(const std::vector<Outcome>& outcomes) {
    std::vector<std::vector<std::string>> rows{{"Mechanism", "Winner", "Rewarded agents", "Social Welfare", "Revenue"}};
    for (const Outcome& o : outcomes) {
        std::string winner = "-";
        if (o.winner()) {
            winner = o.winner()->str() + "(" + o.payment(*o.winner()).to_string() + ")";
        }
        rows.push_back({std::string(mechanism_name(o.mechanism())), winner, rewarded(o), o.social_welfare().to_string(),
                        o.revenue().to_string()});
    }
    std::vector<std::size_t> width(5, 0);
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            width[c] = std::max(width[c], r[c].size());
        }
    }
    std::ostringstream os;
    auto rule = [&] {
        for (std::size_t c = 0; c < width.size(); ++c) {
            os << (c == 0 ? "+" : "") << std::string(width[c] + 2, '-') << "+";
        }
        os << "\n";
    };
    rule();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t c = 0; c < rows[k].size(); ++c) {
            os << (c == 0 ? "| " : " ") << rows[k][c] << std::string(width[c] - rows[k][c].size(), ' ') << " |";
        }
        os << "\n";
        if (k == 0) {
            rule();
        }
    }
    rule();
    os << "Payments in parentheses: positive = payment, negative = reward.\n"
       << "CDM, FDM and NRM are not implemented; see fixtures/figure4_reference.md.\n";
    return os.str();
}

std::string render_csv(const std::vector<Outcome>& outcomes, std::optional<int> scale) {
    auto amount = [&](const Money& m) { return scale ? m.to_fixed(*scale) : m.to_string(); };
    std::ostringstream os;
    os << "mechanism,winner,social_welfare,revenue,agent,payment\n";
    for (const Outcome& o : outcomes) {
        const std::string head = std::string(mechanism_name(o.mechanism())) + "," +
                                 (o.winner() ? o.winner()->str() : std::string()) + "," +
                                 amount(o.social_welfare()) + "," + amount(o.revenue());
        if (o.payments().empty()) {
            os << head << ",,\n";
        }
        for (const auto& [id, p] : o.payments()) {
            os << head << "," << id << "," << amount(p) << "\n";
        }
    }
    return os.str();
}

}  // namespace refauction
