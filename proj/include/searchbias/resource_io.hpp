#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "searchbias/search_core.hpp"

namespace searchbias {

/// Parsed resource-set document: the set plus the file's optional weights.
struct ResourceFile {
    ResourceSet set;
    std::optional<std::vector<double>> weights;

    /// Distribution with the file's weights, or uniform when none were given.
    ResourceDistribution distribution() const;
    ResourceDistribution distribution(std::span<const double> override_weights) const;
};

/// Parses a resource-set JSON document:
///   {"omega_size": N,
///    "resources": [{"id": "...", "strategy": [...]} |
///                  {"id": "...", "fitness": [...], "queries": Q}, ...],
///    "weights": [...]?}
/// Malformed documents raise SchemaError naming the offending field (or the
/// byte position, for JSON syntax errors).
ResourceFile parse_resource_json(std::string_view text, std::string_view origin);

/// parse_resource_json over a file's contents.
ResourceFile load_resource_file(const std::filesystem::path& path);

}  // namespace searchbias
