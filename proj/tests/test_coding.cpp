#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "powertalk/coding.hpp"

using namespace powertalk;
using Catch::Approx;

namespace {

// Independent injectivity check: enumerate every bit vector and insist all
// sum sequences are distinct (ignores the codebook's internal table).
bool sums_are_injective(const UDCodebook& cb) {
    std::set<std::vector<int>> seen;
    for (uint32_t bits = 0; bits < (1u << cb.units()); ++bits) {
        std::vector<uint8_t> b(cb.units());
        for (int u = 0; u < cb.units(); ++u) b[u] = (bits >> u) & 1;
        if (!seen.insert(cb.superpose(b)).second) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("stable rates follow the block-length schedule", "[coding]") {
    CHECK(stable_rate(Mode::tdma, 7) == Approx(1.0 / 7));
    CHECK(stable_rate(Mode::fd, 8) == Approx(0.25));
    CHECK(stable_rate(Mode::fd, 1) == Approx(1.0));

    const int expected[19] = {0, 1, 2, 2, 3, 3, 4, 4, 4, 5, 5, 6, 6, 6, 7, 7, 8, 8, 8};
    for (int k = 1; k <= 18; ++k) {
        CHECK(fd_block_length(k) == expected[k]);
        CHECK(stable_rate(Mode::fd, k) == Approx(1.0 / expected[k]));
    }
}

TEST_CASE("full duplex never pays more slots per bit than TDMA", "[coding]") {
    for (int k = 2; k <= 18; ++k) {
        const double fd = stable_rate(Mode::fd, k);
        const double tdma = stable_rate(Mode::tdma, k);
        CHECK(fd >= tdma);
        if (k != 2) CHECK(fd > tdma);
    }
    CHECK(stable_rate(Mode::fd, 2) == stable_rate(Mode::tdma, 2));
}

TEST_CASE("unsupported sizes are rejected", "[coding]") {
    CHECK_THROWS_AS(stable_rate(Mode::fd, 19), std::out_of_range);
    CHECK_THROWS_AS(stable_rate(Mode::fd, 0), std::out_of_range);
    CHECK_THROWS_AS(UDCodebook::build(19), std::out_of_range);
    CHECK_NOTHROW(stable_rate(Mode::tdma, 50));
}

TEST_CASE("single-user codebook is the trivial one", "[coding]") {
    const auto cb = UDCodebook::build(1);
    CHECK(cb.block_length() == 1);
    CHECK(cb.word(0, 0) == std::vector<uint8_t>{0});
    CHECK(cb.word(0, 1) == std::vector<uint8_t>{1});
}

TEST_CASE("sum maps are injective for every supported size", "[coding][property]") {
    for (int k = 1; k <= 8; ++k) {
        const auto cb = UDCodebook::build(k);
        CHECK(cb.block_length() == fd_block_length(k));
        CHECK(sums_are_injective(cb));
    }
}

TEST_CASE("large codebooks pass randomized collision probes", "[coding][property]") {
    Rng rng(29);
    for (int k = 9; k <= 18; ++k) {
        const auto cb = UDCodebook::build(k);
        std::uniform_int_distribution<uint32_t> draw(0, (1u << k) - 1);
        long probes = k <= 12 ? 200000 : 100000;
        for (long t = 0; t < probes; ++t) {
            const uint32_t x = draw(rng), y = draw(rng);
            if (x == y) continue;
            std::vector<uint8_t> bx(k), by(k);
            for (int u = 0; u < k; ++u) {
                bx[u] = (x >> u) & 1;
                by[u] = (y >> u) & 1;
            }
            REQUIRE(cb.superpose(bx) != cb.superpose(by));
        }
    }
}

TEST_CASE("encode, superpose, decode round-trips", "[coding][property]") {
    Rng rng(31);
    for (int k = 1; k <= 8; ++k) {
        const auto cb = UDCodebook::build(k);
        std::bernoulli_distribution bit(0.5);
        for (int t = 0; t < 1250; ++t) {
            std::vector<uint8_t> bits(k);
            for (auto& b : bits) b = bit(rng);
            const auto sums = cb.superpose(bits);
            const auto back = cb.decode_sums(sums);
            REQUIRE(back.has_value());
            REQUIRE(*back == bits);
        }
    }
}

TEST_CASE("zero bits round-trip through the zero-word sum", "[coding]") {
    const auto cb = UDCodebook::build(4);
    const std::vector<uint8_t> zeros(4, 0);
    const auto sums = cb.superpose(zeros);
    const auto back = cb.decode_sums(sums);
    REQUIRE(back.has_value());
    CHECK(*back == zeros);
}

TEST_CASE("out-of-range sums have no preimage", "[coding]") {
    const auto cb = UDCodebook::build(3);
    std::vector<int> sums(cb.block_length(), 0);
    sums[0] = 4;  // more than three users can add up to
    CHECK_FALSE(cb.decode_sums(sums).has_value());
    std::vector<int> negative(cb.block_length(), 0);
    negative[0] = -1;
    CHECK_FALSE(cb.decode_sums(negative).has_value());
}

TEST_CASE("two-unit receiver reads the other unit's codeword directly", "[coding]") {
    const auto cb = UDCodebook::build(2);
    for (int other_bit = 0; other_bit < 2; ++other_bit) {
        const auto& w = cb.word(0, other_bit);
        std::vector<int> weights(w.begin(), w.end());
        const auto bits = receiver_decode(cb, 1, weights);
        REQUIRE(bits.has_value());
        REQUIRE(bits->size() == 1);
        CHECK((*bits)[0] == other_bit);
    }
}

TEST_CASE("three-unit receiver decodes every pair of the others", "[coding]") {
    const auto cb = UDCodebook::build(3);
    const SumDecoder decoder(cb, 1);
    for (int b0 = 0; b0 < 2; ++b0)
        for (int b2 = 0; b2 < 2; ++b2) {
            std::vector<int> weights(cb.block_length(), 0);
            for (int t = 0; t < cb.block_length(); ++t)
                weights[t] = cb.word(0, b0)[t] + cb.word(2, b2)[t];
            const auto bits = decoder.decode(weights);
            REQUIRE(bits.has_value());
            CHECK((*bits)[0] == b0);
            CHECK((*bits)[1] == b2);
        }
}

TEST_CASE("a corrupted weight estimate never passes silently", "[coding][property]") {
    Rng rng(37);
    const auto cb = UDCodebook::build(5);
    const SumDecoder decoder(cb, 0);
    std::bernoulli_distribution bit(0.5);
    std::uniform_int_distribution<int> slot(0, cb.block_length() - 1);
    std::uniform_int_distribution<int> bump(1, 3);
    for (int t = 0; t < 2000; ++t) {
        std::vector<uint8_t> bits(5);
        for (auto& b : bits) b = bit(rng);
        std::vector<int> weights(cb.block_length(), 0);
        for (int u = 1; u < 5; ++u)
            for (int s = 0; s < cb.block_length(); ++s)
                weights[s] += cb.word(u, bits[u])[s];
        const int hit = slot(rng);
        weights[hit] = (weights[hit] + bump(rng)) % 5;
        const auto decoded = decoder.decode(weights);
        if (!decoded) continue;  // flagged as corrupt: fine
        std::vector<uint8_t> truth(bits.begin() + 1, bits.end());
        CHECK(*decoded != truth);  // or decodes to a visibly different block
    }
}
