#ifndef SQLGATE_CONFIG_HPP
#define SQLGATE_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sqlgate/delimiters.hpp"
#include "sqlgate/guard.hpp"

namespace sqlgate {

/// Parses a pool file: JSON array of {"open": hex, "close": hex}.
/// Validates pool invariants.
std::vector<MarkerPair> load_pool(const std::string& path);

/// Parses a templates file: JSON array of
/// {"id": ..., "fragments": [{"text": ...} | {"field": ..., "kind": "string"|"number"|"identifier"}]}.
std::vector<QueryTemplate> load_templates(const std::string& path);

/// Serializes a pool back to the hex JSON form (gen-pool subcommand).
std::string pool_to_json(const std::vector<MarkerPair>& pool);

}  // namespace sqlgate

#endif
