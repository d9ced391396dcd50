#include "gselab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gselab {

using nlohmann::json;

namespace {

std::vector<double> number_list(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ParseError(std::string(what) + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

int int_field(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw ParseError(std::string("missing integer field \"") + key + "\"");
    return j.at(key).get<int>();
}

InteractionArray parse_interaction(const json& j) {
    const int q = int_field(j, "q");
    const int r = int_field(j, "r");
    const std::string kind = j.value("kind", std::string("real"));
    if (kind == "real")
        return InteractionArray::real(q, r, number_list(j.at("coefficients"), "coefficients"));
    if (kind == "table") {
        if (!j.contains("tables") || !j.at("tables").is_array())
            throw ParseError("table interaction needs a \"tables\" array");
        std::vector<std::vector<double>> tables;
        for (const auto& t : j.at("tables")) tables.push_back(number_list(t, "table"));
        const int colors = tables.empty() ? 0 : static_cast<int>(tables.front().size());
        return InteractionArray::color_table(q, r, colors, std::move(tables));
    }
    throw ParseError("unknown interaction kind \"" + kind + "\"");
}

LayeredInteraction parse_layered_interaction(const json& j) {
    LayeredInteraction out;
    if (j.is_array()) {
        for (const auto& layer : j) out.push_back(parse_interaction(layer));
    } else {
        out.push_back(parse_interaction(j));
    }
    return out;
}

} // namespace

Instance parse_instance(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ParseError("instance must be an object with a \"kind\" string");
    Instance inst;
    inst.kind = j.at("kind").get<std::string>();
    if (inst.kind == "rarray") {
        const int r = int_field(j, "r");
        const int k = int_field(j, "k");
        inst.rarray = RArray(r, k, number_list(j.at("values"), "values"));
    } else if (inst.kind == "step_kernel") {
        const int r = int_field(j, "r");
        inst.kernel = StepKernel(r, number_list(j.at("masses"), "masses"),
                                 number_list(j.at("values"), "values"));
    } else if (inst.kind == "full_graphon") {
        const int r = int_field(j, "r");
        std::vector<int> gran;
        for (const auto& g : j.at("granularity")) gran.push_back(g.get<int>());
        inst.graphon = FullStepGraphon(r, std::move(gran),
                                       number_list(j.at("values"), "values"),
                                       j.value("colors", 0));
    } else if (inst.kind == "formula") {
        const int n = int_field(j, "n");
        const int r = int_field(j, "r");
        const int q = int_field(j, "q");
        const int d = int_field(j, "d");
        std::vector<Constraint> cs;
        for (const auto& c : j.at("constraints")) {
            Constraint cc;
            cc.table = number_list(c.at("table"), "constraint table");
            for (const auto& v : c.at("edge")) cc.edge.push_back(v.get<int>());
            cs.push_back(std::move(cc));
        }
        inst.formula = Formula(n, r, q, d, std::move(cs), j.value("weighted", false));
    } else if (inst.kind == "layered") {
        const int r = int_field(j, "r");
        const int k = int_field(j, "k");
        std::vector<RArray> layers;
        std::vector<std::string> names;
        for (const auto& layer : j.at("layers")) {
            layers.emplace_back(r, k, number_list(layer.at("values"), "layer values"));
            names.push_back(layer.value("name", std::to_string(names.size())));
        }
        inst.layered = LayeredRArray(std::move(layers), std::move(names));
    } else {
        throw ParseError("unknown instance kind \"" + inst.kind + "\"");
    }
    if (j.contains("interaction"))
        inst.interaction = parse_layered_interaction(j.at("interaction"));
    return inst;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    return parse_instance(j);
}

double Instance::inf_norm() const {
    if (rarray) return rarray->inf_norm();
    if (kernel) return kernel->inf_norm();
    if (graphon) return graphon->inf_norm();
    if (layered) return layered->inf_norm();
    return 0;
}

json rarray_to_json(const RArray& a) {
    return json{{"kind", "rarray"}, {"r", a.r()}, {"k", a.k()}, {"values", a.values()}};
}

json kernel_to_json(const StepKernel& w) {
    return json{{"kind", "step_kernel"},
                {"r", w.r()},
                {"masses", w.masses()},
                {"values", w.values()}};
}

json layered_to_json(const LayeredRArray& w) {
    json layers = json::array();
    for (std::size_t e = 0; e < w.layer_count(); ++e)
        layers.push_back(json{{"name", w.names()[e]}, {"values", w.layer(e).values()}});
    return json{{"kind", "layered"}, {"r", w.r()}, {"k", w.k()}, {"layers", layers}};
}

namespace {

void escape_string(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void dump_value(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::null: out += "null"; break;
        case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
        case json::value_t::number_integer:
            out += std::to_string(j.get<long long>());
            break;
        case json::value_t::number_unsigned:
            out += std::to_string(j.get<unsigned long long>());
            break;
        case json::value_t::number_float: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
            out += buf;
            break;
        }
        case json::value_t::string: escape_string(j.get<std::string>(), out); break;
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                dump_value(v, out);
            }
            out += ']';
            break;
        }
        case json::value_t::object: {
            // nlohmann objects iterate in key order already
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                escape_string(it.key(), out);
                out += ':';
                dump_value(it.value(), out);
            }
            out += '}';
            break;
        }
        default: out += "null";
    }
}

} // namespace

std::string canonical_dump(const json& j) {
    std::string out;
    dump_value(j, out);
    out += '\n';
    return out;
}

void write_result(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write result file " + path);
    out << canonical_dump(j);
}

} // namespace gselab
