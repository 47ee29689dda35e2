#include "sqlgate/parser.hpp"

#include <nlohmann/json.hpp>

namespace sqlgate {

bool ParserConfig::field_permits(const std::string& field_id, TaintKind kind) const {
    auto it = field_kinds.find(field_id);
    if (it == field_kinds.end())
        return kind == TaintKind::StringBody || kind == TaintKind::Number;
    for (TaintKind k : it->second)
        if (k == kind) return true;
    return false;
}

std::string ParseError::to_json() const {
    nlohmann::json j;
    j["position"] = position;
    j["expected"] = expected;
    j["found"] = found;
    if (inside_tainted)
        j["inside_tainted"] = *inside_tainted;
    else
        j["inside_tainted"] = nullptr;
    return j.dump();
}

namespace {

struct ParseFail {
    ParseError error;
};

bool is_comparison_op(const Token& t) {
    return t.kind == TokenKind::Operator &&
           (t.lexeme == "=" || t.lexeme == "<>" || t.lexeme == "<" || t.lexeme == ">" ||
            t.lexeme == "<=" || t.lexeme == ">=");
}

class Parser {
public:
    Parser(const std::vector<Token>& all, const ParserConfig& config) : config_(config) {
        for (const Token& t : all) {
            end_pos_ = std::max(end_pos_, t.end);
            if (t.kind != TokenKind::Whitespace && t.kind != TokenKind::CommentStart)
                toks_.push_back(t);
        }
    }

    SyntaxNode parse_single() {
        SyntaxNode root{"query", {}, {}};
        root.children.push_back(statement());
        if (at(TokenKind::Semicolon)) {
            root.children.push_back(take());
            if (pos_ < toks_.size()) {
                ParseError e = make_error({"end of input"});
                e.multiple_statements = true;
                throw ParseFail{e};
            }
        } else if (pos_ < toks_.size()) {
            fail({"Semicolon", "end of input"});
        }
        return root;
    }

    SyntaxNode parse_script() {
        SyntaxNode root{"statement_list", {}, {}};
        if (toks_.empty()) fail({"Keyword"});
        while (true) {
            root.children.push_back(statement());
            if (at(TokenKind::Semicolon)) {
                root.children.push_back(take());
                if (pos_ >= toks_.size()) break;
                continue;
            }
            if (pos_ >= toks_.size()) break;
            fail({"Semicolon", "end of input"});
        }
        return root;
    }

private:
    const Token* peek(std::size_t ahead = 0) const {
        return pos_ + ahead < toks_.size() ? &toks_[pos_ + ahead] : nullptr;
    }
    bool at(TokenKind kind) const { return peek() && peek()->kind == kind; }
    bool at_kw(const char* name) const {
        return peek() && peek()->kind == TokenKind::Keyword && peek()->keyword == name;
    }
    Token take() { return toks_[pos_++]; }

    ParseError make_error(std::vector<std::string> expected) const {
        ParseError e;
        e.expected = std::move(expected);
        if (const Token* t = peek()) {
            e.position = t->begin;
            e.found = token_kind_name(t->kind);
        } else {
            e.position = end_pos_;
            e.found = "end of input";
        }
        // Attribute the failure to a tainted span when it sits inside one.
        std::optional<std::string> open_field;
        for (std::size_t i = 0; i < pos_ && i < toks_.size(); ++i) {
            if (toks_[i].kind == TokenKind::OpenMarker) open_field = toks_[i].field_id;
            if (toks_[i].kind == TokenKind::CloseMarker) open_field.reset();
        }
        if (!open_field && peek() && peek()->kind != TokenKind::OpenMarker) {
            // Error at a token that is itself within a span.
            for (std::size_t i = 0; i <= pos_ && i < toks_.size(); ++i) {
                if (toks_[i].kind == TokenKind::OpenMarker) open_field = toks_[i].field_id;
                if (toks_[i].kind == TokenKind::CloseMarker) open_field.reset();
            }
        }
        e.inside_tainted = open_field;
        return e;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        throw ParseFail{make_error(std::move(expected))};
    }

    Token expect(TokenKind kind, const char* what) {
        if (!at(kind)) fail({what});
        return take();
    }
    Token expect_kw(const char* name) {
        if (!at_kw(name)) fail({std::string("Keyword ") + name});
        return take();
    }

    SyntaxNode statement() {
        if (at_kw("SELECT")) return select_stmt();
        if (at_kw("INSERT")) return insert_stmt();
        if (at_kw("UPDATE")) return update_stmt();
        if (at_kw("DELETE")) return delete_stmt();
        if (at_kw("DROP")) return drop_stmt();
        fail({"Keyword SELECT", "Keyword INSERT", "Keyword UPDATE", "Keyword DELETE",
              "Keyword DROP"});
    }

    SyntaxNode select_core() {
        SyntaxNode core{"select_core", {}, {}};
        core.children.push_back(expect_kw("SELECT"));
        core.children.push_back(select_list());
        core.children.push_back(expect_kw("FROM"));
        core.children.push_back(table_name());
        if (at_kw("WHERE")) {
            SyntaxNode where{"where", {}, {}};
            where.children.push_back(take());
            where.children.push_back(expr());
            core.children.push_back(std::move(where));
        }
        return core;
    }

    SyntaxNode select_stmt() {
        SyntaxNode node{"select", {}, {}};
        node.children.push_back(select_core());
        while (at_kw("UNION")) {
            node.children.push_back(take());
            node.children.push_back(select_core());
        }
        return node;
    }

    SyntaxNode select_list() {
        SyntaxNode node{"select_list", {}, {}};
        if (at(TokenKind::Operator) && peek()->lexeme == "*") {
            node.children.push_back(take());
            return node;
        }
        node.children.push_back(column_name());
        while (at(TokenKind::Comma)) {
            node.children.push_back(take());
            node.children.push_back(column_name());
        }
        return node;
    }

    SyntaxNode insert_stmt() {
        SyntaxNode node{"insert", {}, {}};
        node.children.push_back(expect_kw("INSERT"));
        node.children.push_back(expect_kw("INTO"));
        node.children.push_back(table_name());
        if (at(TokenKind::LParen)) {
            SyntaxNode cols{"column_list", {}, {}};
            cols.children.push_back(take());
            cols.children.push_back(column_name());
            while (at(TokenKind::Comma)) {
                cols.children.push_back(take());
                cols.children.push_back(column_name());
            }
            cols.children.push_back(expect(TokenKind::RParen, "RParen"));
            node.children.push_back(std::move(cols));
        }
        node.children.push_back(expect_kw("VALUES"));
        SyntaxNode vals{"value_list", {}, {}};
        vals.children.push_back(expect(TokenKind::LParen, "LParen"));
        vals.children.push_back(value());
        while (at(TokenKind::Comma)) {
            vals.children.push_back(take());
            vals.children.push_back(value());
        }
        vals.children.push_back(expect(TokenKind::RParen, "RParen"));
        node.children.push_back(std::move(vals));
        return node;
    }

    SyntaxNode update_stmt() {
        SyntaxNode node{"update", {}, {}};
        node.children.push_back(expect_kw("UPDATE"));
        node.children.push_back(table_name());
        node.children.push_back(expect_kw("SET"));
        node.children.push_back(set_clause());
        while (at(TokenKind::Comma)) {
            node.children.push_back(take());
            node.children.push_back(set_clause());
        }
        if (at_kw("WHERE")) {
            SyntaxNode where{"where", {}, {}};
            where.children.push_back(take());
            where.children.push_back(expr());
            node.children.push_back(std::move(where));
        }
        return node;
    }

    SyntaxNode set_clause() {
        SyntaxNode node{"set_clause", {}, {}};
        node.children.push_back(column_name());
        if (!(at(TokenKind::Operator) && peek()->lexeme == "=")) fail({"Operator ="});
        node.children.push_back(take());
        node.children.push_back(value());
        return node;
    }

    SyntaxNode delete_stmt() {
        SyntaxNode node{"delete", {}, {}};
        node.children.push_back(expect_kw("DELETE"));
        node.children.push_back(expect_kw("FROM"));
        node.children.push_back(table_name());
        if (at_kw("WHERE")) {
            SyntaxNode where{"where", {}, {}};
            where.children.push_back(take());
            where.children.push_back(expr());
            node.children.push_back(std::move(where));
        }
        return node;
    }

    SyntaxNode drop_stmt() {
        SyntaxNode node{"drop", {}, {}};
        node.children.push_back(expect_kw("DROP"));
        node.children.push_back(expect_kw("TABLE"));
        node.children.push_back(table_name());
        return node;
    }

    SyntaxNode expr() {
        SyntaxNode node{"or", {}, {}};
        node.children.push_back(and_expr());
        while (at_kw("OR")) {
            node.children.push_back(take());
            node.children.push_back(and_expr());
        }
        return node;
    }

    SyntaxNode and_expr() {
        SyntaxNode node{"and", {}, {}};
        node.children.push_back(not_expr());
        while (at_kw("AND")) {
            node.children.push_back(take());
            node.children.push_back(not_expr());
        }
        return node;
    }

    SyntaxNode not_expr() {
        SyntaxNode node{"not", {}, {}};
        if (at_kw("NOT")) node.children.push_back(take());
        node.children.push_back(predicate());
        return node;
    }

    // '(' can open a grouped boolean expression or a parenthesized operand
    // of a comparison. Decided by whether a comparison operator follows the
    // matching close paren; no backtracking.
    bool paren_is_operand() const {
        int depth = 0;
        for (std::size_t i = pos_; i < toks_.size(); ++i) {
            if (toks_[i].kind == TokenKind::LParen) ++depth;
            if (toks_[i].kind == TokenKind::RParen) {
                --depth;
                if (depth == 0)
                    return i + 1 < toks_.size() && is_comparison_op(toks_[i + 1]);
            }
        }
        return false;
    }

    SyntaxNode predicate() {
        if (at(TokenKind::LParen) && !paren_is_operand()) {
            SyntaxNode node{"group", {}, {}};
            node.children.push_back(take());
            node.children.push_back(expr());
            node.children.push_back(expect(TokenKind::RParen, "RParen"));
            return node;
        }
        SyntaxNode node{"comparison", {}, {}};
        node.children.push_back(value());
        if (!peek() || !is_comparison_op(*peek())) fail({"Operator (comparison)"});
        node.children.push_back(take());
        node.children.push_back(value());
        return node;
    }

    SyntaxNode marked_span(std::initializer_list<TaintKind> allowed_here) {
        Token open = take();  // OpenMarker
        const std::string& fid = open.field_id;
        SyntaxNode node{"marked", {}, {}};
        node.tainted_field = fid;
        node.children.push_back(open);
        bool handled = false;
        for (TaintKind kind : allowed_here) {
            if (!config_.field_permits(fid, kind)) continue;
            if (kind == TaintKind::Number && at(TokenKind::Number)) {
                node.children.push_back(take());
                handled = true;
                break;
            }
            if (kind == TaintKind::Identifier && at(TokenKind::Identifier)) {
                node.children.push_back(take());
                handled = true;
                break;
            }
            if (kind == TaintKind::StringBody) {
                if (at(TokenKind::StringLiteralBody)) node.children.push_back(take());
                handled = true;  // empty span is a legal empty literal body
                break;
            }
        }
        if (!handled) fail({"tainted value of a permitted kind"});
        node.children.push_back(expect(TokenKind::CloseMarker, "CloseMarker"));
        return node;
    }

    SyntaxNode string_literal() {
        SyntaxNode node{"string", {}, {}};
        node.children.push_back(expect(TokenKind::Quote, "Quote"));
        while (true) {
            if (at(TokenKind::StringLiteralBody)) {
                node.children.push_back(take());
                continue;
            }
            if (at(TokenKind::OpenMarker)) {
                if (!config_.field_permits(peek()->field_id, TaintKind::StringBody))
                    fail({"string literal body"});
                node.children.push_back(marked_span({TaintKind::StringBody}));
                continue;
            }
            break;
        }
        node.children.push_back(expect(TokenKind::Quote, "Quote"));
        return node;
    }

    SyntaxNode value() {
        if (at(TokenKind::Quote)) {
            SyntaxNode node{"value", {}, {}};
            node.children.push_back(string_literal());
            return node;
        }
        if (at(TokenKind::Number)) {
            SyntaxNode node{"value", {}, {}};
            SyntaxNode num{"number", {}, {}};
            num.children.push_back(take());
            node.children.push_back(std::move(num));
            return node;
        }
        if (at(TokenKind::Identifier)) {
            SyntaxNode node{"value", {}, {}};
            node.children.push_back(column_ref());
            return node;
        }
        if (at(TokenKind::OpenMarker)) {
            SyntaxNode node{"value", {}, {}};
            node.children.push_back(marked_span({TaintKind::Number, TaintKind::Identifier}));
            return node;
        }
        if (at(TokenKind::LParen)) {
            SyntaxNode node{"paren_value", {}, {}};
            node.children.push_back(take());
            node.children.push_back(value());
            node.children.push_back(expect(TokenKind::RParen, "RParen"));
            return node;
        }
        fail({"Quote", "Number", "Identifier", "LParen"});
    }

    SyntaxNode column_ref() {
        SyntaxNode node{"column", {}, {}};
        node.children.push_back(expect(TokenKind::Identifier, "Identifier"));
        return node;
    }

    SyntaxNode column_name() {
        if (at(TokenKind::OpenMarker) &&
            config_.field_permits(peek()->field_id, TaintKind::Identifier))
            return marked_span({TaintKind::Identifier});
        return column_ref();
    }

    SyntaxNode table_name() {
        if (at(TokenKind::OpenMarker) &&
            config_.field_permits(peek()->field_id, TaintKind::Identifier)) {
            SyntaxNode node{"table", {}, {}};
            node.children.push_back(marked_span({TaintKind::Identifier}));
            return node;
        }
        SyntaxNode node{"table", {}, {}};
        node.children.push_back(expect(TokenKind::Identifier, "Identifier"));
        return node;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t end_pos_ = 0;
    const ParserConfig& config_;
};

}  // namespace

ParseResult parse(const std::vector<Token>& tokens, const ParserConfig& config) {
    Parser p(tokens, config);
    try {
        return ParseTree{p.parse_single()};
    } catch (const ParseFail& f) {
        return f.error;
    }
}

ParseResult parse_unmarked(const Bytes& raw) {
    LexResult lexed = tokenize_unmarked(raw);
    if (const LexError* le = std::get_if<LexError>(&lexed)) {
        ParseError e;
        e.position = le->position;
        e.expected = {"lexable input"};
        e.found = "unlexable byte";
        return e;
    }
    ParserConfig config;
    Parser p(std::get<std::vector<Token>>(lexed), config);
    try {
        return ParseTree{p.parse_script()};
    } catch (const ParseFail& f) {
        return f.error;
    }
}

}  // namespace sqlgate
