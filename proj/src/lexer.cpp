#include "sqlgate/lexer.hpp"

#include <algorithm>
#include <cctype>

namespace sqlgate {

const char* token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::Keyword: return "Keyword";
        case TokenKind::Identifier: return "Identifier";
        case TokenKind::StringLiteralBody: return "StringLiteralBody";
        case TokenKind::Number: return "Number";
        case TokenKind::Operator: return "Operator";
        case TokenKind::Comma: return "Comma";
        case TokenKind::Semicolon: return "Semicolon";
        case TokenKind::Quote: return "Quote";
        case TokenKind::CommentStart: return "CommentStart";
        case TokenKind::OpenMarker: return "OpenMarker";
        case TokenKind::CloseMarker: return "CloseMarker";
        case TokenKind::LParen: return "LParen";
        case TokenKind::RParen: return "RParen";
        case TokenKind::Whitespace: return "Whitespace";
    }
    return "?";
}

namespace {

const char* kKeywords[] = {"SELECT", "FROM", "WHERE", "AND", "OR",     "NOT",    "INSERT", "INTO",
                           "VALUES", "UPDATE", "SET", "DELETE", "DROP", "TABLE", "UNION"};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

std::string upper(const Bytes& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

// One marker occurrence as a pre-located pseudo-token.
struct MarkerAt {
    std::size_t begin, end;
    bool open;
    int pair_id;
    std::string field_id;
};

LexResult lex(const Bytes& input, const std::vector<MarkerAt>& markers) {
    std::vector<Token> tokens;
    std::size_t pos = 0;
    std::size_t next_marker = 0;
    bool in_string = false;

    auto marker_boundary = [&](std::size_t from) {
        return next_marker < markers.size() ? markers[next_marker].begin : input.size();
    };
    auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) -> Token& {
        tokens.push_back(Token{kind, input.substr(begin, end - begin), begin, end, {}, -1, {}});
        return tokens.back();
    };

    while (pos < input.size()) {
        // Markers always lex first, whatever the surrounding context.
        if (next_marker < markers.size() && markers[next_marker].begin == pos) {
            const MarkerAt& m = markers[next_marker];
            Token& t = push(m.open ? TokenKind::OpenMarker : TokenKind::CloseMarker, m.begin, m.end);
            t.pair_id = m.pair_id;
            t.field_id = m.field_id;
            pos = m.end;
            ++next_marker;
            continue;
        }
        std::size_t limit = marker_boundary(pos);
        unsigned char c = static_cast<unsigned char>(input[pos]);

        if (c == '\'') {
            push(TokenKind::Quote, pos, pos + 1);
            in_string = !in_string;
            ++pos;
            continue;
        }
        if (in_string) {
            // Everything up to the next quote or marker is literal body.
            std::size_t end = pos;
            while (end < limit && input[end] != '\'') ++end;
            push(TokenKind::StringLiteralBody, pos, end);
            pos = end;
            continue;
        }
        if (std::isspace(c)) {
            std::size_t end = pos;
            while (end < limit && std::isspace(static_cast<unsigned char>(input[end]))) ++end;
            push(TokenKind::Whitespace, pos, end);
            pos = end;
            continue;
        }
        if (c == '-' && pos + 1 < limit && input[pos + 1] == '-') {
            // Line comment; stops at newline or at the next marker.
            std::size_t end = pos + 2;
            while (end < limit && input[end] != '\n') ++end;
            push(TokenKind::CommentStart, pos, end);
            pos = end;
            continue;
        }
        if (std::isdigit(c)) {
            std::size_t end = pos;
            while (end < limit && std::isdigit(static_cast<unsigned char>(input[end]))) ++end;
            push(TokenKind::Number, pos, end);
            pos = end;
            continue;
        }
        if (is_ident_start(c)) {
            std::size_t end = pos;
            while (end < limit && is_ident_char(static_cast<unsigned char>(input[end]))) ++end;
            Token& t = push(TokenKind::Identifier, pos, end);
            std::string up = upper(t.lexeme);
            for (const char* kw : kKeywords) {
                if (up == kw) {
                    t.kind = TokenKind::Keyword;
                    t.keyword = up;
                    break;
                }
            }
            pos = end;
            continue;
        }
        switch (c) {
            case ',': push(TokenKind::Comma, pos, pos + 1); ++pos; continue;
            case ';': push(TokenKind::Semicolon, pos, pos + 1); ++pos; continue;
            case '(': push(TokenKind::LParen, pos, pos + 1); ++pos; continue;
            case ')': push(TokenKind::RParen, pos, pos + 1); ++pos; continue;
            case '=':
            case '*':
            case '+':
            case '-': push(TokenKind::Operator, pos, pos + 1); ++pos; continue;
            case '<': {
                std::size_t end = pos + 1;
                if (end < limit && (input[end] == '>' || input[end] == '=')) ++end;
                push(TokenKind::Operator, pos, end);
                pos = end;
                continue;
            }
            case '>': {
                std::size_t end = pos + 1;
                if (end < limit && input[end] == '=') ++end;
                push(TokenKind::Operator, pos, end);
                pos = end;
                continue;
            }
            default: return LexError{pos};
        }
    }
    return tokens;
}

}  // namespace

LexResult tokenize(const MarkedQuery& mq) {
    std::vector<MarkerAt> markers;
    for (const MarkerSpan& span : mq.spans) {
        markers.push_back({span.open_begin, span.open_end, true, span.pair_id, span.field_id});
        markers.push_back({span.close_begin, span.close_end, false, span.pair_id, span.field_id});
    }
    std::sort(markers.begin(), markers.end(),
              [](const MarkerAt& a, const MarkerAt& b) { return a.begin < b.begin; });
    return lex(mq.bytes, markers);
}

LexResult tokenize_unmarked(const Bytes& raw) { return lex(raw, {}); }

}  // namespace sqlgate
