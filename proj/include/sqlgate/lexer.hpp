#ifndef SQLGATE_LEXER_HPP
#define SQLGATE_LEXER_HPP

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "sqlgate/taint.hpp"

namespace sqlgate {

enum class TokenKind {
    Keyword,
    Identifier,
    StringLiteralBody,
    Number,
    Operator,
    Comma,
    Semicolon,
    Quote,
    CommentStart,
    OpenMarker,
    CloseMarker,
    LParen,
    RParen,
    Whitespace,
};

const char* token_kind_name(TokenKind kind);

struct Token {
    TokenKind kind;
    Bytes lexeme;            // raw bytes, markers included for marker tokens
    std::size_t begin = 0;   // byte offsets into the lexed input
    std::size_t end = 0;
    std::string keyword;     // uppercased name, Keyword tokens only
    int pair_id = -1;        // marker tokens only
    std::string field_id;    // marker tokens only
};

struct LexError {
    std::size_t position = 0;
};

using LexResult = std::variant<std::vector<Token>, LexError>;

/// Lexes a marked query. Marker occurrences (at the offsets recorded by
/// render) always win; single quotes toggle string context, inside which
/// bytes lex as StringLiteralBody runs; "--" outside strings starts a line
/// comment that stops at end of line or at a marker.
LexResult tokenize(const MarkedQuery& mq);

/// Same lexer with no markers, for plain SQL.
LexResult tokenize_unmarked(const Bytes& raw);

}  // namespace sqlgate

#endif
