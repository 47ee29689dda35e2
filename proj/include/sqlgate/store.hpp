#ifndef SQLGATE_STORE_HPP
#define SQLGATE_STORE_HPP

#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "sqlgate/parser.hpp"

namespace sqlgate {

struct StoreTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Bytes>> rows;  // arity == columns.size()
};

struct ResultSet {
    std::vector<std::string> columns;
    std::vector<std::vector<Bytes>> rows;
};

struct StoreError {
    std::string message;
};

using ExecResult = std::variant<ResultSet, StoreError>;

/// Toy in-memory table store standing in for the RDBMS: enough evaluation
/// (SELECT/INSERT/UPDATE/DELETE/DROP, WHERE over comparisons, UNION) that
/// injection success and failure are observable. Single writer, shared
/// readers.
class Store {
public:
    Store() = default;
    Store(const Store& other);
    Store& operator=(const Store&) = delete;

    void create_table(StoreTable table);

    /// Replaces the whole contents with another store's tables.
    void reset_from(const Store& other);
    bool has_table(const std::string& name) const;
    const StoreTable* table(const std::string& name) const;  // unsynchronized view, tests only
    std::vector<std::string> table_names() const;

    /// Direct row insert, bypassing any validation. The demo's
    /// filtration-skipped storage path.
    void insert_row(const std::string& table, std::vector<Bytes> row);

    /// Evaluates a parse tree (single statement or statement list) against
    /// the store. Multi-statement trees run sequentially; the result of
    /// the last row-producing statement is returned.
    ExecResult execute(const ParseTree& tree);

    /// FNV-1a over the full table contents; detects any mutation.
    std::uint64_t content_hash() const;

    /// login/users/users1/Debit_Card1_d/Employee_Table1_e tables with the
    /// demo rows, including the Adminstrator/admin login.
    static Store demo_seed();

private:
    ExecResult execute_statement(const SyntaxNode& stmt);

    std::map<std::string, StoreTable> tables_;
    mutable std::shared_mutex mutex_;
};

}  // namespace sqlgate

#endif
