#ifndef SQLGATE_PARSER_HPP
#define SQLGATE_PARSER_HPP

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sqlgate/lexer.hpp"

namespace sqlgate {

/// Which single terminal a tainted span may derive at its position.
enum class TaintKind { StringBody, Number, Identifier };

struct ParserConfig {
    // Absent fields fall back to {StringBody, Number}.
    std::map<std::string, std::vector<TaintKind>> field_kinds;

    bool field_permits(const std::string& field_id, TaintKind kind) const;
};

struct SyntaxNode {
    std::string rule;
    std::vector<std::variant<SyntaxNode, Token>> children;
    std::optional<std::string> tainted_field;  // set on marked-span nodes only
};

struct ParseTree {
    SyntaxNode root;
};

struct ParseError {
    std::size_t position = 0;
    std::vector<std::string> expected;  // token-kind names
    std::string found;
    std::optional<std::string> inside_tainted;
    bool multiple_statements = false;

    std::string to_json() const;
};

using ParseResult = std::variant<ParseTree, ParseError>;

/// Parses one statement (optional trailing semicolon) from a marked token
/// stream. A marked span reduces only when its whole content is one
/// permitted terminal for that field. Extra statements after a semicolon
/// are the MultipleStatements error variant.
ParseResult parse(const std::vector<Token>& tokens, const ParserConfig& config = {});

/// Parses plain SQL with multiple semicolon-separated statements allowed.
/// Backs the brute-force oracle and the vulnerable demo endpoints.
ParseResult parse_unmarked(const Bytes& raw);

}  // namespace sqlgate

#endif
