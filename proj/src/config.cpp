#include "sqlgate/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sqlgate {

namespace {

std::string hex_decode(const std::string& hex) {
    if (hex.size() % 2 != 0) throw ConfigError("hex string has odd length: " + hex);
    std::string out;
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        auto nibble = [&](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            throw ConfigError("invalid hex digit in marker spec");
        };
        out += static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1]));
    }
    return out;
}

std::string hex_encode(const std::string& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned char c : bytes) {
        out += digits[c >> 4];
        out += digits[c & 0xf];
    }
    return out;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("invalid JSON in " + path);
    return j;
}

}  // namespace

std::vector<MarkerPair> load_pool(const std::string& path) {
    nlohmann::json j = load_json_file(path);
    if (!j.is_array()) throw ConfigError("pool file must be a JSON array");
    std::vector<MarkerPair> pool;
    int id = 0;
    for (const auto& entry : j) {
        MarkerPair p;
        p.open = hex_decode(entry.at("open").get<std::string>());
        p.close = hex_decode(entry.at("close").get<std::string>());
        p.pair_id = id++;
        pool.push_back(std::move(p));
    }
    check_pool(pool);
    return pool;
}

std::string pool_to_json(const std::vector<MarkerPair>& pool) {
    nlohmann::json j = nlohmann::json::array();
    for (const MarkerPair& p : pool)
        j.push_back({{"open", hex_encode(p.open)}, {"close", hex_encode(p.close)}});
    return j.dump(2);
}

std::vector<QueryTemplate> load_templates(const std::string& path) {
    nlohmann::json j = load_json_file(path);
    if (!j.is_array()) throw ConfigError("templates file must be a JSON array");
    std::vector<QueryTemplate> out;
    for (const auto& entry : j) {
        std::string id = entry.at("id").get<std::string>();
        TaintedString build;
        std::vector<TemplateField> fields;
        for (const auto& frag : entry.at("fragments")) {
            if (frag.contains("text")) {
                build = build + TaintedString::literal(frag["text"].get<std::string>());
            } else if (frag.contains("field")) {
                std::string fid = frag["field"].get<std::string>();
                std::string kind = frag.value("kind", "string");
                TaintKind tk;
                if (kind == "string")
                    tk = TaintKind::StringBody;
                else if (kind == "number")
                    tk = TaintKind::Number;
                else if (kind == "identifier")
                    tk = TaintKind::Identifier;
                else
                    throw ConfigError("template '" + id + "': unknown field kind '" + kind + "'");
                build = build + TaintedString::tainted("", fid);
                fields.push_back({fid, tk});
            } else {
                throw ConfigError("template '" + id + "': fragment needs 'text' or 'field'");
            }
        }
        out.emplace_back(std::move(id), std::move(build), std::move(fields));
    }
    return out;
}

}  // namespace sqlgate
