#include "qfe/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

using namespace qfe;

TEST_CASE("identical (seed, stream) gives identical sequences") {
    SeededRng a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("derivation is independent of parent stream position") {
    SeededRng parent1(1, 0), parent2(1, 0);
    parent2.uniform(); // advance one parent only
    SeededRng c1 = parent1.derive(3);
    SeededRng c2 = parent2.derive(3);
    for (int i = 0; i < 100; ++i) REQUIRE(c1.next_u64() == c2.next_u64());
}

TEST_CASE("different streams differ") {
    SeededRng root(9, 0);
    SeededRng a = root.derive(0);
    SeededRng b = root.derive(1);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += (a.next_u64() == b.next_u64());
    CHECK(same == 0);
}

TEST_CASE("uniform lies in [0,1) and has sane moments") {
    SeededRng rng(5, 5);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sq += u * u;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 5.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normal deviates have sane moments") {
    SeededRng rng(11, 0);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 0.02);
}
