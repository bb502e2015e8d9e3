#include <doctest.h>
#include <jumptime/rng.hpp>

#include <set>

using namespace jumptime;

TEST_CASE("philox matches reference blocks") {
    // reference streams start at counter 1
    Philox4x64::Key const key{0x1234, 0xabcdef};
    auto const first = Philox4x64::encrypt({1, 0, 0, 0}, key);
    auto const second = Philox4x64::encrypt({2, 0, 0, 0}, key);
    CHECK(first == Philox4x64::Block{0xe1d8516957e79cb7, 0xa135bff31e1e3c67, 0x83dd0e4fe4683024, 0xbd6398aacd9cc6e8});
    CHECK(second == Philox4x64::Block{0x8a09bb80d35d03c0, 0x076b2972a13496f3, 0x7e65e0508348d17f, 0xcac6964a96161279});

    auto const zero = Philox4x64::encrypt({1, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox4x64::Block{0x02f4ba6408e4d89b, 0x3dd62b0b9ca8c5b2, 0x1c8667a55d902e79, 0x907d7a052fd5b4dc});
}

TEST_CASE("streams are reproducible and distinct") {
    Philox4x64 a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 16; ++i) {
        auto const x = a.next_u64();
        CHECK(x == b.next_u64());
        seen.insert(x);
        seen.insert(c.next_u64());
        seen.insert(d.next_u64());
    }
    CHECK(seen.size() == 48);
}

TEST_CASE("uniform draws lie in the open unit interval") {
    Philox4x64 g(1, 0);
    double sum = 0;
    for (int i = 0; i < 20000; ++i) {
        double const u = g.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.01));
}
