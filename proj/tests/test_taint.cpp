#include <doctest.h>

#include <random>

#include "sqlgate/taint.hpp"

using namespace sqlgate;

namespace {

MarkerAssignment single_pair(const std::string& fid, const MarkerPair& pair) {
    MarkerAssignment a;
    a.fields.emplace_back(fid, pair);
    return a;
}

}  // namespace

TEST_CASE("literal keeps its text verbatim") {
    auto ts = TaintedString::literal("SELECT * FROM login WHERE name='");
    CHECK(ts.raw() == "SELECT * FROM login WHERE name='");
    CHECK(ts.segments().size() == 1);
    CHECK(ts.segments()[0].origin == Origin::Trusted);

    CHECK(TaintedString::literal("").raw() == "");
    CHECK(TaintedString::literal("' AND password='").raw() == "' AND password='");
}

TEST_CASE("tainted carries the payload and its provenance") {
    auto ts = TaintedString::tainted("administrator1_ad", "name");
    CHECK(ts.raw() == "administrator1_ad");
    CHECK(ts.segments()[0].field_id == "name");

    auto attack = TaintedString::tainted("' OR 1=1 --", "name");
    CHECK(attack.raw() == "' OR 1=1 --");

    CHECK(TaintedString::tainted("", "password").raw() == "");
    CHECK_THROWS_AS(TaintedString::tainted("x", ""), EmptyFieldIdError);
}

TEST_CASE("concat preserves raw bytes and taint origins") {
    auto xy = TaintedString::literal("x") + TaintedString::literal("y");
    CHECK(xy.raw() == "xy");
    CHECK(xy.segments().size() == 1);  // adjacent trusted segments merge

    auto mixed = TaintedString::literal("name='") + TaintedString::tainted("admin1_ad", "name");
    CHECK(mixed.raw() == "name='admin1_ad");
    CHECK(mixed.segments().size() == 2);

    auto two = TaintedString::tainted("p", "a") + TaintedString::tainted("q", "b");
    CHECK(two.segments().size() == 2);
    CHECK(two.field_ids() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("concat is associative over raw and segment order") {
    auto a = TaintedString::literal("A");
    auto b = TaintedString::tainted("B", "f");
    auto c = TaintedString::literal("C");
    auto left = (a + b) + c;
    auto right = a + (b + c);
    CHECK(left.raw() == right.raw());
    CHECK(left.segments().size() == right.segments().size());
}

TEST_CASE("render wraps tainted segments and strip removes the wrapping") {
    MarkerPair pair{"\xc2\xab", "\xc2\xbb", 0};
    auto ts = TaintedString::literal("a=") + TaintedString::tainted("1", "f");
    MarkedQuery mq = render(ts, single_pair("f", pair));
    CHECK(mq.bytes == "a=\xc2\xab" "1\xc2\xbb");
    CHECK(mq.spans.size() == 1);
    CHECK(strip(mq) == "a=1");
}

TEST_CASE("render of the login template shape") {
    MarkerPair p0{"\xc2\xab", "\xc2\xbb", 0};
    MarkerPair p1{"\x1f\x42", "\x1f\x62", 1};
    auto ts = TaintedString::literal("SELECT * FROM login WHERE name='") +
              TaintedString::tainted("' OR 1=1 --", "name") +
              TaintedString::literal("' AND password='") +
              TaintedString::tainted("", "password") + TaintedString::literal("';");
    MarkerAssignment a;
    a.fields.emplace_back("name", p0);
    a.fields.emplace_back("password", p1);
    MarkedQuery mq = render(ts, a);
    CHECK(mq.bytes ==
          "SELECT * FROM login WHERE name='\xc2\xab' OR 1=1 --\xc2\xbb' AND password='\x1f\x42\x1f\x62';");
    CHECK(strip(mq) == ts.raw());
}

TEST_CASE("render errors") {
    MarkerPair pair{"\xc2\xab", "\xc2\xbb", 0};
    auto colliding = TaintedString::tainted("x\xc2\xabx", "f");
    CHECK_THROWS_AS(render(colliding, single_pair("f", pair)), MarkerCollisionError);

    auto ts = TaintedString::tainted("x", "g");
    CHECK_THROWS_AS(render(ts, single_pair("f", pair)), MissingAssignmentError);
}

TEST_CASE("strip rejects corrupted marked queries") {
    MarkerPair pair{"\xc2\xab", "\xc2\xbb", 0};
    auto ts = TaintedString::literal("a=") + TaintedString::tainted("1", "f");
    MarkedQuery mq = render(ts, single_pair("f", pair));

    MarkedQuery dangling = mq;
    dangling.bytes = dangling.bytes.substr(0, dangling.spans[0].close_begin);  // open, no close
    CHECK_THROWS_AS(strip(dangling), UnbalancedMarkersError);

    MarkedQuery scrambled = mq;
    scrambled.bytes[scrambled.spans[0].open_begin] = 'Z';
    CHECK_THROWS_AS(strip(scrambled), UnbalancedMarkersError);
}

TEST_CASE("roundtrip property over random tainted strings") {
    std::mt19937_64 rng(7);
    std::vector<MarkerPair> pool = MarkerPolicy::default_pool();
    for (int iter = 0; iter < 500; ++iter) {
        TaintedString ts;
        MarkerAssignment a;
        int segments = 1 + int(rng() % 6);
        int field = 0;
        for (int s = 0; s < segments; ++s) {
            std::string text;
            for (int i = int(rng() % 12); i > 0; --i)
                text += char('!' + rng() % 90);  // printable, never 0x1f
            if (rng() % 2 == 0) {
                ts = ts + TaintedString::literal(text);
            } else {
                std::string fid = "f" + std::to_string(field);
                a.fields.emplace_back(fid, pool[field % pool.size()]);
                ts = ts + TaintedString::tainted(text, fid);
                ++field;
            }
        }
        MarkedQuery mq = render(ts, a);
        CHECK(strip(mq) == ts.raw());
    }
}
