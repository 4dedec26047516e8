#include "searchbias/resource_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace searchbias {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(std::string_view origin, const std::string& field,
                              const std::string& why) {
    throw SchemaError(std::string(origin) + ": " + field + ": " + why);
}

std::vector<double> number_array(const json& node, std::string_view origin,
                                 const std::string& field) {
    if (!node.is_array()) {
        schema_fail(origin, field, "expected an array of numbers");
    }
    std::vector<double> out;
    out.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].is_number()) {
            schema_fail(origin, field + "[" + std::to_string(i) + "]", "expected a number");
        }
        out.push_back(node[i].get<double>());
    }
    return out;
}

InformationResource parse_resource(const json& node, int omega_size, std::string_view origin,
                                   const std::string& field) {
    if (!node.is_object()) {
        schema_fail(origin, field, "expected an object");
    }
    if (!node.contains("id") || !node["id"].is_string()) {
        schema_fail(origin, field + ".id", "expected a string");
    }
    const std::string id = node["id"].get<std::string>();

    const bool has_strategy = node.contains("strategy");
    const bool has_fitness = node.contains("fitness");
    if (has_strategy == has_fitness) {
        schema_fail(origin, field, "needs exactly one of 'strategy' or 'fitness'");
    }

    if (has_strategy) {
        const std::vector<double> raw = number_array(node["strategy"], origin, field + ".strategy");
        try {
            return InformationResource{
                id, ExplicitStrategy{StrategyDistribution::validated(omega_size, raw)}};
        } catch (const Error& e) {
            schema_fail(origin, field + ".strategy", e.what());
        }
    }

    const std::vector<double> fitness = number_array(node["fitness"], origin, field + ".fitness");
    if (!node.contains("queries") || !node["queries"].is_number_integer()) {
        schema_fail(origin, field + ".queries", "expected an integer");
    }
    const auto queries = node["queries"].get<std::int64_t>();
    if (queries < 1 || queries > 1'000'000) {
        schema_fail(origin, field + ".queries", "must lie in [1, 1e6]");
    }
    if (fitness.size() != static_cast<std::size_t>(omega_size)) {
        schema_fail(origin, field + ".fitness",
                    "expected " + std::to_string(omega_size) + " entries, got " +
                        std::to_string(fitness.size()));
    }
    return InformationResource{id, FitnessTask{fitness, static_cast<int>(queries)}};
}

}  // namespace

ResourceDistribution ResourceFile::distribution() const {
    if (weights) {
        return ResourceDistribution(set, *weights);
    }
    return ResourceDistribution::uniform(set);
}

ResourceDistribution ResourceFile::distribution(std::span<const double> override_weights) const {
    return ResourceDistribution(set, override_weights);
}

ResourceFile parse_resource_json(std::string_view text, std::string_view origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string(origin) + ": invalid JSON at byte " + std::to_string(e.byte) +
                          ": " + e.what());
    }
    if (!doc.is_object()) {
        schema_fail(origin, "$", "expected a JSON object");
    }
    if (!doc.contains("omega_size") || !doc["omega_size"].is_number_integer()) {
        schema_fail(origin, "omega_size", "expected an integer");
    }
    const auto omega = doc["omega_size"].get<std::int64_t>();
    if (omega < 1 || omega > 10'000'000) {
        schema_fail(origin, "omega_size", "must lie in [1, 1e7]");
    }
    if (!doc.contains("resources") || !doc["resources"].is_array() || doc["resources"].empty()) {
        schema_fail(origin, "resources", "expected a non-empty array");
    }

    std::vector<InformationResource> resources;
    resources.reserve(doc["resources"].size());
    for (std::size_t i = 0; i < doc["resources"].size(); ++i) {
        resources.push_back(parse_resource(doc["resources"][i], static_cast<int>(omega), origin,
                                           "resources[" + std::to_string(i) + "]"));
    }

    std::optional<std::vector<double>> weights;
    if (doc.contains("weights")) {
        weights = number_array(doc["weights"], origin, "weights");
        if (weights->size() != resources.size()) {
            schema_fail(origin, "weights",
                        "expected one weight per resource (" + std::to_string(resources.size()) +
                            "), got " + std::to_string(weights->size()));
        }
    }

    for (const auto& key : doc.items()) {
        if (key.key() != "omega_size" && key.key() != "resources" && key.key() != "weights") {
            schema_fail(origin, key.key(), "unknown field");
        }
    }

    try {
        ResourceSet set(static_cast<int>(omega), std::move(resources));
        if (weights) {
            // Validate now so weight problems surface as file diagnostics.
            ResourceDistribution check(set, *weights);
        }
        return ResourceFile{std::move(set), std::move(weights)};
    } catch (const Error& e) {
        throw SchemaError(std::string(origin) + ": " + e.what());
    }
}

ResourceFile load_resource_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError(path.string() + ": cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_resource_json(buf.str(), path.string());
}

}  // namespace searchbias
