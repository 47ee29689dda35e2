#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "sqlgate/delimiters.hpp"

using namespace sqlgate;

TEST_CASE("pool invariants") {
    auto pool = MarkerPolicy::default_pool();
    CHECK(pool.size() == 8);
    CHECK_NOTHROW(check_pool(pool));

    SUBCASE("single pair cannot rotate") {
        std::vector<MarkerPair> one{{"\x1f\x41", "\x1f\x61", 0}};
        CHECK_THROWS_AS(MarkerPolicy(one, RotationMode::Dynamic, 1), PoolTooSmallError);
        CHECK_NOTHROW(MarkerPolicy(one, RotationMode::Static, 1));
    }
    SUBCASE("substring overlap is rejected") {
        std::vector<MarkerPair> bad{{"\xc2\xab", "\xc2\xbb", 0}, {"\xc2\xab\x58", "!!", 1}};
        CHECK_THROWS_AS(check_pool(bad), OverlappingMarkersError);
    }
    SUBCASE("open equal to close is rejected") {
        std::vector<MarkerPair> bad{{"@@", "@@", 0}, {"##", "$$", 1}};
        CHECK_THROWS_AS(check_pool(bad), OverlappingMarkersError);
    }
}

TEST_CASE("identical seeds give identical assignment streams") {
    auto pool = MarkerPolicy::default_pool();
    MarkerPolicy a(pool, RotationMode::Dynamic, 42);
    MarkerPolicy b(pool, RotationMode::Dynamic, 42);
    for (int i = 0; i < 200; ++i) {
        auto x = a.assign({"f"});
        auto y = b.assign({"f"});
        CHECK(x.fields[0].second.pair_id == y.fields[0].second.pair_id);
    }
}

TEST_CASE("static mode maps every field to the fixed pair") {
    MarkerPolicy policy(MarkerPolicy::default_pool(), RotationMode::Static, 42, 0);
    auto a = policy.assign({"name", "password"});
    CHECK(a.fields[0].second.pair_id == 0);
    CHECK(a.fields[1].second.pair_id == 0);
}

TEST_CASE("dynamic mode never repeats consecutively, across query boundaries") {
    MarkerPolicy policy(MarkerPolicy::default_pool(), RotationMode::Dynamic, 42);
    auto a = policy.assign({"name", "password"});
    CHECK(a.fields[0].second.pair_id != a.fields[1].second.pair_id);

    int last = a.fields[1].second.pair_id;
    for (int i = 0; i < 1000; ++i) {
        auto next = policy.assign({"f"});
        CHECK(next.fields[0].second.pair_id != last);
        last = next.fields[0].second.pair_id;
    }
}

TEST_CASE("duplicate field ids are rejected") {
    MarkerPolicy policy(MarkerPolicy::default_pool(), RotationMode::Dynamic, 1);
    CHECK_THROWS_AS(policy.assign({"a", "b", "a"}), DuplicateFieldIdError);
}

TEST_CASE("rotation frequency stays near uniform over pool minus previous") {
    MarkerPolicy policy(MarkerPolicy::default_pool(), RotationMode::Dynamic, 42);
    std::map<int, int> counts;
    const int n = 10000;
    int last = -1;
    for (int i = 0; i < n; ++i) {
        int id = policy.assign({"f"}).fields[0].second.pair_id;
        CHECK(id != last);
        ++counts[id];
        last = id;
    }
    // Stationary per-pair frequency is 1/8; tolerance +-5 percentage points.
    for (const auto& [id, count] : counts) {
        double freq = double(count) / n;
        CHECK(freq > 0.125 - 0.05);
        CHECK(freq < 0.125 + 0.05);
    }
}

TEST_CASE("reassign_on_collision avoids pairs embedded in the text") {
    auto pool = MarkerPolicy::default_pool();

    SUBCASE("clean text succeeds on the first draw") {
        MarkerPolicy policy(pool, RotationMode::Dynamic, 42);
        MarkerPair p = policy.reassign_on_collision("f", "hello");
        CHECK_FALSE(pair_collides(p, "hello"));
    }
    SUBCASE("text containing 7 of 8 pairs forces the 8th") {
        std::string text;
        for (int i = 0; i < 7; ++i) text += pool[i].open + pool[i].close;
        MarkerPolicy policy(pool, RotationMode::Dynamic, 42);
        MarkerPair p = policy.reassign_on_collision("f", text, 64);
        CHECK(p.pair_id == 7);
        CHECK_FALSE(pair_collides(p, text));
    }
    SUBCASE("text containing all pairs exhausts the draws") {
        std::string text;
        for (const MarkerPair& p : pool) text += p.open + p.close;
        MarkerPolicy policy(pool, RotationMode::Dynamic, 42);
        CHECK_THROWS_AS(policy.reassign_on_collision("f", text, 16), CollisionExhaustedError);
    }
    SUBCASE("static mode gives up when its only pair collides") {
        MarkerPolicy policy(pool, RotationMode::Static, 42, 3);
        CHECK_THROWS_AS(policy.reassign_on_collision("f", pool[3].open, 16),
                        CollisionExhaustedError);
    }
}
