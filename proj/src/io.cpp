#include "elastonet/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace elastonet {

namespace {

using json = nlohmann::ordered_json;

json position_to_json(const Eigen::VectorXd& p) {
    json arr = json::array();
    for (int i = 0; i < p.size(); ++i) arr.push_back(p(i));
    return arr;
}

Eigen::VectorXd position_from_json(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) {
        throw ParseError("expected a coordinate array in " + where);
    }
    Eigen::VectorXd p(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw ParseError("non-numeric coordinate in " + where);
        p(static_cast<int>(i)) = arr[i].get<double>();
    }
    return p;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const std::string& where) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
        throw ParseError("expected a matrix (array of rows) in " + where);
    }
    const int nr = static_cast<int>(rows.size());
    const int nc = static_cast<int>(rows[0].size());
    Eigen::MatrixXd m(nr, nc);
    for (int r = 0; r < nr; ++r) {
        if (static_cast<int>(rows[r].size()) != nc) {
            throw ParseError("ragged matrix rows in " + where);
        }
        for (int c = 0; c < nc; ++c) {
            if (!rows[r][c].is_number()) {
                throw ParseError("non-numeric matrix entry in " + where);
            }
            m(r, c) = rows[r][c].get<double>();
        }
    }
    return m;
}

json parse_text(const std::string& text) {
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw ParseError("malformed JSON document");
    return doc;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string network_to_json(const Network& net) {
    std::vector<Node> nodes = net.nodes();
    std::sort(nodes.begin(), nodes.end(),
              [](const Node& a, const Node& b) { return a.label < b.label; });
    std::vector<Spring> springs = net.springs();
    for (auto& s : springs) {
        if (s.b < s.a) std::swap(s.a, s.b);
    }
    std::sort(springs.begin(), springs.end(), [](const Spring& a, const Spring& b) {
        return std::tie(a.a, a.b) < std::tie(b.a, b.b);
    });

    json doc;
    doc["version"] = 1;
    doc["dimension"] = net.dimension();
    json jnodes = json::array();
    for (const auto& n : nodes) {
        json jn;
        jn["label"] = n.label;
        jn["position"] = position_to_json(n.position);
        jn["mass"] = n.mass;
        jn["kind"] = n.kind == NodeKind::Terminal ? "terminal" : "interior";
        jnodes.push_back(std::move(jn));
    }
    doc["nodes"] = std::move(jnodes);
    json jsprings = json::array();
    for (const auto& s : springs) {
        json js;
        js["a"] = s.a;
        js["b"] = s.b;
        js["stiffness"] = s.stiffness;
        jsprings.push_back(std::move(js));
    }
    doc["springs"] = std::move(jsprings);
    return doc.dump(2) + "\n";
}

Network network_from_json(const std::string& text) {
    json doc = parse_text(text);
    if (!doc.is_object()) throw ParseError("network file must be an object");
    if (!doc.contains("dimension") || !doc["dimension"].is_number_integer()) {
        throw ParseError("network file needs an integer 'dimension'");
    }
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
        throw ParseError("network file needs a 'nodes' array");
    }
    std::vector<Node> nodes;
    for (const auto& jn : doc["nodes"]) {
        if (!jn.is_object() || !jn.contains("label") || !jn["label"].is_string()) {
            throw ParseError("node record needs a string 'label'");
        }
        const std::string label = jn["label"].get<std::string>();
        if (!jn.contains("position")) {
            throw ParseError("node '" + label + "' is missing its position");
        }
        Node node;
        node.label = label;
        node.position = position_from_json(jn["position"], "node '" + label + "'");
        node.mass = jn.value("mass", 0.0);
        const std::string kind = jn.value("kind", "interior");
        if (kind == "terminal") {
            node.kind = NodeKind::Terminal;
        } else if (kind == "interior") {
            node.kind = NodeKind::Interior;
        } else {
            throw ParseError("node '" + label + "' has unknown kind '" + kind + "'");
        }
        nodes.push_back(std::move(node));
    }
    std::vector<Spring> springs;
    for (const auto& js : doc.value("springs", json::array())) {
        if (!js.is_object() || !js.contains("a") || !js.contains("b") ||
            !js.contains("stiffness") || !js["stiffness"].is_number()) {
            throw ParseError("spring record needs 'a', 'b' and a numeric 'stiffness'");
        }
        springs.push_back({js["a"].get<std::string>(), js["b"].get<std::string>(),
                           js["stiffness"].get<double>()});
    }
    try {
        return Network(doc["dimension"].get<int>(), std::move(nodes),
                       std::move(springs));
    } catch (const Error& e) {
        throw ParseError(std::string("invalid network: ") + e.what());
    }
}

std::string response_spec_to_json(const ResponseSpec& spec) {
    json doc;
    doc["version"] = 1;
    if (spec.static_response.has_value() == spec.modal_response.has_value()) {
        throw Error("response spec must hold exactly one of static/modal");
    }
    const auto& positions = spec.static_response
                                ? spec.static_response->terminal_positions
                                : spec.modal_response->terminal_positions;
    json jpos = json::array();
    for (const auto& p : positions) jpos.push_back(position_to_json(p));
    doc["terminal_positions"] = std::move(jpos);
    if (spec.static_response) {
        doc["static_matrix"] = matrix_to_json(spec.static_response->matrix);
    } else {
        const auto& m = *spec.modal_response;
        json jm;
        jm["A"] = matrix_to_json(m.A);
        json jmass = json::array();
        for (int i = 0; i < m.terminal_masses.size(); ++i) {
            jmass.push_back(m.terminal_masses(i));
        }
        jm["masses"] = std::move(jmass);
        json jterms = json::array();
        for (const auto& t : m.terms) {
            json jt;
            jt["omega_sq"] = t.omega_sq;
            jt["C"] = matrix_to_json(t.C);
            jterms.push_back(std::move(jt));
        }
        jm["terms"] = std::move(jterms);
        doc["modal"] = std::move(jm);
    }
    return doc.dump(2) + "\n";
}

ResponseSpec response_spec_from_json(const std::string& text) {
    json doc = parse_text(text);
    if (!doc.is_object()) throw ParseError("response spec must be an object");
    if (!doc.contains("terminal_positions")) {
        throw ParseError("response spec needs 'terminal_positions'");
    }
    std::vector<Eigen::VectorXd> positions;
    for (const auto& jp : doc["terminal_positions"]) {
        positions.push_back(position_from_json(jp, "terminal_positions"));
    }
    ResponseSpec spec;
    if (doc.contains("static_matrix")) {
        spec.static_response =
            StaticResponse{positions, matrix_from_json(doc["static_matrix"],
                                                       "static_matrix")};
    } else if (doc.contains("modal")) {
        const auto& jm = doc["modal"];
        ModalResponse m;
        m.terminal_positions = positions;
        if (!jm.contains("A")) throw ParseError("modal spec needs 'A'");
        m.A = matrix_from_json(jm["A"], "modal.A");
        if (!jm.contains("masses") || !jm["masses"].is_array()) {
            throw ParseError("modal spec needs a 'masses' array");
        }
        m.terminal_masses.resize(jm["masses"].size());
        for (size_t i = 0; i < jm["masses"].size(); ++i) {
            if (!jm["masses"][i].is_number()) {
                throw ParseError("non-numeric entry in modal.masses");
            }
            m.terminal_masses(static_cast<int>(i)) = jm["masses"][i].get<double>();
        }
        for (const auto& jt : jm.value("terms", json::array())) {
            if (!jt.contains("omega_sq") || !jt["omega_sq"].is_number() ||
                !jt.contains("C")) {
                throw ParseError("modal term needs 'omega_sq' and 'C'");
            }
            m.terms.push_back({jt["omega_sq"].get<double>(),
                               matrix_from_json(jt["C"], "modal term C")});
        }
        spec.modal_response = std::move(m);
    } else {
        throw ParseError("response spec needs 'static_matrix' or 'modal'");
    }
    return spec;
}

Network load_network(const std::string& path) {
    return network_from_json(read_file(path));
}

void save_network(const Network& net, const std::string& path) {
    write_file(path, network_to_json(net));
}

ResponseSpec load_response_spec(const std::string& path) {
    return response_spec_from_json(read_file(path));
}

void save_response_spec(const ResponseSpec& spec, const std::string& path) {
    write_file(path, response_spec_to_json(spec));
}

}  // namespace elastonet
