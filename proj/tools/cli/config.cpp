#include "config.hpp"

#include "roving/error.hpp"

#include <cmath>
#include <fstream>
#include <type_traits>

namespace roving::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

double parse_number(const std::string& text, const std::string& where)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        fail(where + ": '" + text + "' is not a number");
    }
    if (used != text.size()) fail(where + ": '" + text + "' is not a number");
    return v;
}

class Resolver {
public:
    Resolver(const json& params, const Overrides& overrides)
    {
        if (!params.is_null()) {
            if (!params.is_object()) fail("\"params\" must be an object");
            for (const auto& [key, value] : params.items()) {
                if (!value.is_number()) fail("param '" + key + "' must be a number");
                values_[key] = value.get<double>();
            }
        }
        for (const auto& [key, value] : overrides) {
            if (!values_.count(key)) fail("unknown param '" + key + "'");
            values_[key] = value;
        }
    }

    double number(const json& node, const std::string& where) const
    {
        if (node.is_number()) return node.get<double>();
        if (node.is_string()) {
            const auto name = node.get<std::string>();
            if (auto it = values_.find(name); it != values_.end()) return it->second;
            return parse_number(name, where);
        }
        fail(where + ": expected a number or a param name");
    }

    double field(const json& obj, const char* key, const std::string& where) const
    {
        if (!obj.contains(key)) fail(where + ": missing \"" + key + "\"");
        return number(obj.at(key), where + "." + key);
    }

    std::vector<double> list(const json& obj, const char* key, const std::string& where) const
    {
        if (!obj.contains(key) || !obj.at(key).is_array()) fail(where + ": \"" + key + "\" must be an array");
        std::vector<double> out;
        for (const auto& v : obj.at(key)) out.push_back(number(v, where + "." + key));
        return out;
    }

private:
    std::map<std::string, double> values_;
};

DistributionSpec parse_distribution(const json& node, const Resolver& r, const std::string& where)
{
    if (!node.is_object() || !node.contains("type") || !node.at("type").is_string()) {
        fail(where + ": distribution needs a \"type\"");
    }
    const auto type = node.at("type").get<std::string>();
    if (type == "det") return Deterministic{r.field(node, "value", where)};
    if (type == "exp") return Exponential{r.field(node, "rate", where)};
    if (type == "erlang") {
        const double phases = r.field(node, "phases", where);
        if (phases != std::floor(phases) || phases < 1.0) fail(where + ": erlang phases must be a positive integer");
        return Erlang{static_cast<int>(phases), r.field(node, "rate", where)};
    }
    if (type == "hyperexp") return HyperExponential{r.list(node, "weights", where), r.list(node, "rates", where)};
    if (type == "gamma") return Gamma{r.field(node, "shape", where), r.field(node, "rate", where)};
    fail(where + ": unknown distribution type '" + type + "'");
}

json distribution_to_json(const DistributionSpec& dist)
{
    return std::visit(
        [](const auto& d) -> json {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) return {{"type", "det"}, {"value", d.value}};
            else if constexpr (std::is_same_v<T, Exponential>) return {{"type", "exp"}, {"rate", d.rate}};
            else if constexpr (std::is_same_v<T, Erlang>)
                return {{"type", "erlang"}, {"phases", d.phases}, {"rate", d.rate}};
            else if constexpr (std::is_same_v<T, HyperExponential>)
                return {{"type", "hyperexp"}, {"weights", d.weights}, {"rates", d.rates}};
            else return {{"type", "gamma"}, {"shape", d.shape}, {"rate", d.rate}};
        },
        dist);
}

}  // namespace

NetworkSpec parse_network(const json& doc, const Overrides& overrides)
{
    if (doc.is_object() && doc.contains("model")) return parse_network(doc.at("model"), overrides);
    if (!doc.is_object()) fail("config must be a JSON object");
    const Resolver r(doc.contains("params") ? doc.at("params") : json(), overrides);

    if (!doc.contains("queues") || !doc.at("queues").is_array() || doc.at("queues").empty()) {
        fail("\"queues\" must be a non-empty array");
    }
    NetworkSpec spec;
    std::size_t index = 0;
    for (const auto& q : doc.at("queues")) {
        const std::string where = "queues[" + std::to_string(index++) + "]";
        if (!q.is_object()) fail(where + " must be an object");
        QueueSpec qs;
        qs.arrival_rate = q.contains("lambda") ? r.number(q.at("lambda"), where + ".lambda") : 0.0;
        if (!q.contains("service")) fail(where + ": missing \"service\"");
        qs.service = parse_distribution(q.at("service"), r, where + ".service");
        qs.switchover = q.contains("switchover") ? parse_distribution(q.at("switchover"), r, where + ".switchover")
                                                 : DistributionSpec{Deterministic{0.0}};
        const std::string discipline = q.value("discipline", std::string("gated"));
        if (discipline == "gated") qs.discipline = Discipline::Gated;
        else if (discipline == "exhaustive") qs.discipline = Discipline::Exhaustive;
        else fail(where + ": discipline must be \"gated\" or \"exhaustive\"");
        spec.queues.push_back(std::move(qs));
    }

    if (!doc.contains("routing") || !doc.at("routing").is_array()) fail("\"routing\" must be an array of rows");
    index = 0;
    for (const auto& row : doc.at("routing")) {
        const std::string where = "routing[" + std::to_string(index++) + "]";
        if (!row.is_array()) fail(where + " must be an array");
        std::vector<double> values;
        for (const auto& v : row) values.push_back(r.number(v, where));
        spec.routing.push_back(std::move(values));
    }
    return spec;
}

NetworkSpec load_network(const std::filesystem::path& path, const Overrides& overrides)
{
    std::ifstream in(path);
    if (!in) fail("cannot open config '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_network(doc, overrides);
}

json network_to_json(const NetworkSpec& spec)
{
    json queues = json::array();
    for (const auto& q : spec.queues) {
        queues.push_back({{"lambda", q.arrival_rate},
                          {"service", distribution_to_json(q.service)},
                          {"switchover", distribution_to_json(q.switchover)},
                          {"discipline", q.discipline == Discipline::Gated ? "gated" : "exhaustive"}});
    }
    return {{"queues", queues}, {"routing", spec.routing}};
}

void add_override(Overrides& overrides, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) fail("--param expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    overrides[key] = parse_number(assignment.substr(eq + 1), "--param " + key);
}

}  // namespace roving::cli
