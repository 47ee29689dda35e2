#include "sqlgate/store.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace sqlgate {

namespace {

const Token* first_token(const SyntaxNode& node) {
    for (const auto& child : node.children) {
        if (const Token* t = std::get_if<Token>(&child)) return t;
        const Token* inner = first_token(std::get<SyntaxNode>(child));
        if (inner) return inner;
    }
    return nullptr;
}

const SyntaxNode* child_node(const SyntaxNode& node, const std::string& rule,
                             std::size_t skip = 0) {
    for (const auto& child : node.children) {
        if (const SyntaxNode* n = std::get_if<SyntaxNode>(&child)) {
            if (n->rule == rule) {
                if (skip == 0) return n;
                --skip;
            }
        }
    }
    return nullptr;
}

std::vector<const SyntaxNode*> child_nodes(const SyntaxNode& node, const std::string& rule) {
    std::vector<const SyntaxNode*> out;
    for (const auto& child : node.children)
        if (const SyntaxNode* n = std::get_if<SyntaxNode>(&child))
            if (n->rule == rule) out.push_back(n);
    return out;
}

// A scalar operand: either a column reference or a literal value.
struct Operand {
    bool is_column = false;
    std::string column;
    Bytes value;
};

Operand eval_value(const SyntaxNode& node) {
    if (node.rule == "value" || node.rule == "paren_value") {
        for (const auto& child : node.children)
            if (const SyntaxNode* n = std::get_if<SyntaxNode>(&child)) return eval_value(*n);
        return {};
    }
    if (node.rule == "string" || node.rule == "marked") {
        Operand op;
        for (const auto& child : node.children)
            if (const Token* t = std::get_if<Token>(&child))
                if (t->kind == TokenKind::StringLiteralBody || t->kind == TokenKind::Number)
                    op.value += t->lexeme;
        return op;
    }
    if (node.rule == "number") {
        Operand op;
        if (const Token* t = first_token(node)) op.value = t->lexeme;
        return op;
    }
    if (node.rule == "column") {
        Operand op;
        op.is_column = true;
        if (const Token* t = first_token(node)) op.column = t->lexeme;
        return op;
    }
    return {};
}

bool all_digits(const Bytes& s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool compare(const Bytes& a, const std::string& op, const Bytes& b) {
    int cmp;
    if (all_digits(a) && all_digits(b) && a.size() <= 18 && b.size() <= 18) {
        long long x = std::stoll(a), y = std::stoll(b);
        cmp = x < y ? -1 : (x > y ? 1 : 0);
    } else {
        cmp = a.compare(b);
        cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
    }
    if (op == "=") return cmp == 0;
    if (op == "<>") return cmp != 0;
    if (op == "<") return cmp < 0;
    if (op == ">") return cmp > 0;
    if (op == "<=") return cmp <= 0;
    if (op == ">=") return cmp >= 0;
    return false;
}

struct RowContext {
    const StoreTable* table = nullptr;
    const std::vector<Bytes>* row = nullptr;
};

std::optional<Bytes> resolve(const Operand& op, const RowContext& ctx, std::string& error) {
    if (!op.is_column) return op.value;
    if (!ctx.table) {
        error = "unknown column: " + op.column;
        return std::nullopt;
    }
    for (std::size_t i = 0; i < ctx.table->columns.size(); ++i)
        if (ctx.table->columns[i] == op.column) return (*ctx.row)[i];
    error = "unknown column: " + op.column;
    return std::nullopt;
}

bool eval_bool(const SyntaxNode& node, const RowContext& ctx, std::string& error);

bool eval_comparison(const SyntaxNode& node, const RowContext& ctx, std::string& error) {
    std::vector<const SyntaxNode*> operands;
    std::string op;
    for (const auto& child : node.children) {
        if (const SyntaxNode* n = std::get_if<SyntaxNode>(&child)) operands.push_back(n);
        if (const Token* t = std::get_if<Token>(&child))
            if (t->kind == TokenKind::Operator) op = t->lexeme;
    }
    if (operands.size() != 2) {
        error = "malformed comparison";
        return false;
    }
    auto lhs = resolve(eval_value(*operands[0]), ctx, error);
    auto rhs = resolve(eval_value(*operands[1]), ctx, error);
    if (!lhs || !rhs) return false;
    return compare(*lhs, op, *rhs);
}

bool eval_bool(const SyntaxNode& node, const RowContext& ctx, std::string& error) {
    if (node.rule == "comparison") return eval_comparison(node, ctx, error);
    if (node.rule == "group") {
        const SyntaxNode* inner = child_node(node, "or");
        return inner ? eval_bool(*inner, ctx, error) : false;
    }
    if (node.rule == "not") {
        bool negate = false;
        for (const auto& child : node.children)
            if (const Token* t = std::get_if<Token>(&child))
                if (t->kind == TokenKind::Keyword && t->keyword == "NOT") negate = true;
        for (const auto& child : node.children)
            if (const SyntaxNode* n = std::get_if<SyntaxNode>(&child)) {
                bool v = eval_bool(*n, ctx, error);
                return negate ? !v : v;
            }
        return false;
    }
    if (node.rule == "or" || node.rule == "and") {
        bool is_or = node.rule == "or";
        bool acc = is_or ? false : true;
        for (const auto& child : node.children)
            if (const SyntaxNode* n = std::get_if<SyntaxNode>(&child)) {
                bool v = eval_bool(*n, ctx, error);
                acc = is_or ? (acc || v) : (acc && v);
            }
        return acc;
    }
    error = "unsupported predicate: " + node.rule;
    return false;
}

std::string table_name_of(const SyntaxNode& stmt, const std::string& rule_after) {
    (void)rule_after;
    const SyntaxNode* t = child_node(stmt, "table");
    if (!t) return {};
    const Token* tok = first_token(*t);
    return tok ? tok->lexeme : std::string{};
}

}  // namespace

Store::Store(const Store& other) {
    std::shared_lock lock(other.mutex_);
    tables_ = other.tables_;
}

void Store::reset_from(const Store& other) {
    auto copy = [&] {
        std::shared_lock lock(other.mutex_);
        return other.tables_;
    }();
    std::unique_lock lock(mutex_);
    tables_ = std::move(copy);
}

void Store::create_table(StoreTable table) {
    std::unique_lock lock(mutex_);
    tables_[table.name] = std::move(table);
}

bool Store::has_table(const std::string& name) const {
    std::shared_lock lock(mutex_);
    return tables_.count(name) > 0;
}

const StoreTable* Store::table(const std::string& name) const {
    std::shared_lock lock(mutex_);
    auto it = tables_.find(name);
    return it == tables_.end() ? nullptr : &it->second;
}

std::vector<std::string> Store::table_names() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> names;
    for (const auto& [name, _] : tables_) names.push_back(name);
    return names;
}

void Store::insert_row(const std::string& table, std::vector<Bytes> row) {
    std::unique_lock lock(mutex_);
    auto it = tables_.find(table);
    if (it == tables_.end()) throw std::runtime_error("no such table: " + table);
    if (row.size() != it->second.columns.size())
        throw std::runtime_error("row arity mismatch for table " + table);
    it->second.rows.push_back(std::move(row));
}

ExecResult Store::execute(const ParseTree& tree) {
    const SyntaxNode& root = tree.root;
    std::vector<const SyntaxNode*> statements;
    for (const auto& child : root.children)
        if (const SyntaxNode* n = std::get_if<SyntaxNode>(&child)) statements.push_back(n);

    ExecResult last = ResultSet{};
    bool have_rows = false;
    for (const SyntaxNode* stmt : statements) {
        ExecResult r = execute_statement(*stmt);
        if (std::holds_alternative<StoreError>(r)) return r;
        const ResultSet& rs = std::get<ResultSet>(r);
        if (!rs.columns.empty() || !rs.rows.empty() || !have_rows) {
            last = std::move(r);
            have_rows = !std::get<ResultSet>(last).columns.empty();
        }
    }
    return last;
}

ExecResult Store::execute_statement(const SyntaxNode& stmt) {
    std::unique_lock lock(mutex_);

    if (stmt.rule == "select") {
        ResultSet result;
        for (const auto& child : stmt.children) {
            const SyntaxNode* core = std::get_if<SyntaxNode>(&child);
            if (!core || core->rule != "select_core") continue;

            std::string tname = table_name_of(*core, "table");
            auto it = tables_.find(tname);
            if (it == tables_.end()) return StoreError{"unknown table: " + tname};
            const StoreTable& tbl = it->second;

            const SyntaxNode* sl = child_node(*core, "select_list");
            bool star = sl && child_nodes(*sl, "column").empty();
            std::vector<std::size_t> projection;
            std::vector<std::string> out_columns;
            if (star) {
                for (std::size_t i = 0; i < tbl.columns.size(); ++i) projection.push_back(i);
                out_columns = tbl.columns;
            } else {
                for (const SyntaxNode* col : child_nodes(*sl, "column")) {
                    const Token* tok = first_token(*col);
                    std::string cname = tok ? tok->lexeme : std::string{};
                    auto pos = std::find(tbl.columns.begin(), tbl.columns.end(), cname);
                    if (pos == tbl.columns.end())
                        return StoreError{"unknown column: " + cname};
                    projection.push_back(static_cast<std::size_t>(pos - tbl.columns.begin()));
                    out_columns.push_back(cname);
                }
            }
            if (result.columns.empty()) result.columns = out_columns;

            const SyntaxNode* where = child_node(*core, "where");
            const SyntaxNode* cond = where ? child_node(*where, "or") : nullptr;
            for (const auto& row : tbl.rows) {
                std::string error;
                if (cond) {
                    RowContext ctx{&tbl, &row};
                    if (!eval_bool(*cond, ctx, error)) {
                        if (!error.empty()) return StoreError{error};
                        continue;
                    }
                    if (!error.empty()) return StoreError{error};
                }
                std::vector<Bytes> out_row;
                for (std::size_t i : projection) out_row.push_back(row[i]);
                result.rows.push_back(std::move(out_row));
            }
        }
        return result;
    }

    if (stmt.rule == "insert") {
        std::string tname = table_name_of(stmt, "table");
        auto it = tables_.find(tname);
        if (it == tables_.end()) return StoreError{"unknown table: " + tname};
        StoreTable& tbl = it->second;

        std::vector<Bytes> values;
        const SyntaxNode* vl = child_node(stmt, "value_list");
        if (vl)
            for (const auto& child : vl->children)
                if (const SyntaxNode* n = std::get_if<SyntaxNode>(&child)) {
                    std::string error;
                    auto v = resolve(eval_value(*n), RowContext{}, error);
                    if (!v) return StoreError{error};
                    values.push_back(*v);
                }

        const SyntaxNode* cl = child_node(stmt, "column_list");
        if (cl) {
            std::vector<Bytes> row(tbl.columns.size());
            auto cols = child_nodes(*cl, "column");
            if (cols.size() != values.size())
                return StoreError{"insert arity mismatch for table " + tname};
            for (std::size_t i = 0; i < cols.size(); ++i) {
                const Token* tok = first_token(*cols[i]);
                std::string cname = tok ? tok->lexeme : std::string{};
                auto pos = std::find(tbl.columns.begin(), tbl.columns.end(), cname);
                if (pos == tbl.columns.end()) return StoreError{"unknown column: " + cname};
                row[static_cast<std::size_t>(pos - tbl.columns.begin())] = values[i];
            }
            tbl.rows.push_back(std::move(row));
        } else {
            if (values.size() != tbl.columns.size())
                return StoreError{"insert arity mismatch for table " + tname};
            tbl.rows.push_back(std::move(values));
        }
        return ResultSet{};
    }

    if (stmt.rule == "update") {
        std::string tname = table_name_of(stmt, "table");
        auto it = tables_.find(tname);
        if (it == tables_.end()) return StoreError{"unknown table: " + tname};
        StoreTable& tbl = it->second;

        const SyntaxNode* where = child_node(stmt, "where");
        const SyntaxNode* cond = where ? child_node(*where, "or") : nullptr;
        for (auto& row : tbl.rows) {
            std::string error;
            if (cond) {
                RowContext ctx{&tbl, &row};
                bool match = eval_bool(*cond, ctx, error);
                if (!error.empty()) return StoreError{error};
                if (!match) continue;
            }
            for (const SyntaxNode* sc : child_nodes(stmt, "set_clause")) {
                const SyntaxNode* col = child_node(*sc, "column");
                const Token* tok = col ? first_token(*col) : nullptr;
                std::string cname = tok ? tok->lexeme : std::string{};
                auto pos = std::find(tbl.columns.begin(), tbl.columns.end(), cname);
                if (pos == tbl.columns.end()) return StoreError{"unknown column: " + cname};
                std::string verror;
                const SyntaxNode* vn = child_node(*sc, "value");
                if (!vn) vn = child_node(*sc, "paren_value");
                if (!vn) return StoreError{"malformed set clause"};
                auto v = resolve(eval_value(*vn), RowContext{&tbl, &row}, verror);
                if (!v) return StoreError{verror};
                row[static_cast<std::size_t>(pos - tbl.columns.begin())] = *v;
            }
        }
        return ResultSet{};
    }

    if (stmt.rule == "delete") {
        std::string tname = table_name_of(stmt, "table");
        auto it = tables_.find(tname);
        if (it == tables_.end()) return StoreError{"unknown table: " + tname};
        StoreTable& tbl = it->second;
        const SyntaxNode* where = child_node(stmt, "where");
        const SyntaxNode* cond = where ? child_node(*where, "or") : nullptr;
        std::string error;
        auto new_end = std::remove_if(tbl.rows.begin(), tbl.rows.end(),
                                      [&](const std::vector<Bytes>& row) {
                                          if (!cond) return true;
                                          RowContext ctx{&tbl, &row};
                                          return eval_bool(*cond, ctx, error);
                                      });
        if (!error.empty()) return StoreError{error};
        tbl.rows.erase(new_end, tbl.rows.end());
        return ResultSet{};
    }

    if (stmt.rule == "drop") {
        std::string tname = table_name_of(stmt, "table");
        if (!tables_.count(tname)) return StoreError{"unknown table: " + tname};
        tables_.erase(tname);
        return ResultSet{};
    }

    return StoreError{"unsupported statement: " + stmt.rule};
}

std::uint64_t Store::content_hash() const {
    std::shared_lock lock(mutex_);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    for (const auto& [name, tbl] : tables_) {
        mix(name);
        for (const auto& col : tbl.columns) mix(col);
        for (const auto& row : tbl.rows)
            for (const auto& cell : row) mix(cell);
    }
    return h;
}

Store Store::demo_seed() {
    Store store;
    store.create_table(StoreTable{
        "login",
        {"name", "password"},
        {{"Adminstrator", "admin"}, {"bob", "secret"}, {"mary jane", "pass word"}}});
    store.create_table(StoreTable{
        "users",
        {"name", "address", "phone"},
        {{"bob", "12 Elm Road", "5550100"}, {"carol", "9 Hill", "5550199"}}});
    store.create_table(StoreTable{
        "users1", {"login1_area", "pass", "bank_accounts"}, {{"branch7", "pin42", "acct-1001"}}});
    store.create_table(StoreTable{
        "Debit_Card1_d", {"card_no1_c", "accountNo1_a"}, {{"4111-0000-1111-2222", "100"}}});
    store.create_table(StoreTable{
        "Employee_Table1_e",
        {"Last_name1_l", "First_name1_f", "Title_t1_t", "Notes_n1_n", "City_name1_c"},
        {{"Patel", "Asha", "Engineer", "none", "Jaipur"}}});
    return store;
}

}  // namespace sqlgate
