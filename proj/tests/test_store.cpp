#include <doctest.h>

#include "sqlgate/parser.hpp"
#include "sqlgate/store.hpp"

using namespace sqlgate;

namespace {

ResultSet exec(Store& store, const std::string& sql) {
    ParseResult pr = parse_unmarked(sql);
    REQUIRE_MESSAGE(std::holds_alternative<ParseTree>(pr), sql);
    ExecResult r = store.execute(std::get<ParseTree>(pr));
    REQUIRE_MESSAGE(std::holds_alternative<ResultSet>(r), sql);
    return std::get<ResultSet>(r);
}

}  // namespace

TEST_CASE("seeded login lookup returns the matching row") {
    Store store = Store::demo_seed();
    ResultSet rs =
        exec(store, "SELECT * FROM login WHERE name='Adminstrator' AND password='admin'");
    REQUIRE(rs.rows.size() == 1);
    CHECK(rs.rows[0][0] == "Adminstrator");
}

TEST_CASE("tautology returns every row on the raw path") {
    Store store = Store::demo_seed();
    ResultSet rs = exec(store, "SELECT * FROM login WHERE name='' OR 1=1");
    CHECK(rs.rows.size() == 3);
}

TEST_CASE("piggybacked drop removes the table") {
    Store store = Store::demo_seed();
    exec(store, "SELECT * FROM login WHERE name='admin' AND password=''; drop table login ;");
    CHECK_FALSE(store.has_table("login"));
}

TEST_CASE("union pulls rows from the unintended table") {
    Store store = Store::demo_seed();
    ResultSet rs = exec(store,
                        "SELECT bank_accounts FROM users1 WHERE login1_area='' "
                        "UNION SELECT card_no1_c from Debit_Card1_d where accountNo1_a=100");
    REQUIRE(rs.rows.size() == 1);
    CHECK(rs.rows[0][0] == "4111-0000-1111-2222");
}

TEST_CASE("insert, update, delete") {
    Store store = Store::demo_seed();
    exec(store, "INSERT INTO users (name, address, phone) VALUES ('zed', 'nowhere', '1')");
    CHECK(store.table("users")->rows.size() == 3);

    exec(store, "UPDATE users SET address = 'somewhere' WHERE name = 'zed'");
    bool found = false;
    for (const auto& row : store.table("users")->rows)
        if (row[0] == "zed") {
            found = true;
            CHECK(row[1] == "somewhere");
        }
    CHECK(found);

    exec(store, "DELETE FROM users WHERE name = 'zed'");
    CHECK(store.table("users")->rows.size() == 2);
}

TEST_CASE("errors surface as StoreError") {
    Store store = Store::demo_seed();
    auto run = [&](const std::string& sql) {
        ParseResult pr = parse_unmarked(sql);
        REQUIRE(std::holds_alternative<ParseTree>(pr));
        return store.execute(std::get<ParseTree>(pr));
    };
    CHECK(std::holds_alternative<StoreError>(run("SELECT * FROM nosuch")));
    CHECK(std::holds_alternative<StoreError>(run("SELECT nocol FROM login")));
    CHECK(std::holds_alternative<StoreError>(run("SELECT * FROM login WHERE nocol='x'")));
}

TEST_CASE("content hash tracks mutations") {
    Store store = Store::demo_seed();
    std::uint64_t before = store.content_hash();
    CHECK(before == Store::demo_seed().content_hash());

    exec(store, "SELECT * FROM login WHERE name='' OR 1=1");
    CHECK(store.content_hash() == before);  // reads do not mutate

    exec(store, "INSERT INTO users (name, address, phone) VALUES ('q', 'w', 'e')");
    CHECK(store.content_hash() != before);
}

TEST_CASE("numeric and byte comparisons") {
    Store store;
    store.create_table(StoreTable{"t", {"a"}, {{"5"}, {"50"}, {"x"}}});
    // "50" wins numerically; "x" is not a number so it byte-compares above "7".
    CHECK(exec(store, "SELECT * FROM t WHERE a > 7").rows.size() == 2);
    CHECK(exec(store, "SELECT * FROM t WHERE a < 7").rows.size() == 1);     // numeric 5
    CHECK(exec(store, "SELECT * FROM t WHERE a = 'x'").rows.size() == 1);  // byte equality
    CHECK(exec(store, "SELECT * FROM t WHERE NOT a = 'x'").rows.size() == 2);
}
