#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "powertalk/coding.hpp"
#include "powertalk/protocol.hpp"

using namespace powertalk;
using Catch::Approx;

TEST_CASE("training plans count the schedule slots", "[protocol]") {
    CHECK(TrainingPlan::make(Mode::tdma, 10, 1).total_slots == 20);
    CHECK(TrainingPlan::make(Mode::tdma, 4, 3).total_slots == 24);
    CHECK(TrainingPlan::make(Mode::fd, 10, 1).total_slots == 200);
    CHECK(TrainingPlan::make(Mode::fd, 4, 2).total_slots == 64);
    CHECK(TrainingPlan::make(Mode::fd, 4, 2, 7).blank_slots == 7);
}

TEST_CASE("periodic rate approaches the no-change limit", "[protocol]") {
    for (Mode mode : {Mode::tdma, Mode::fd}) {
        for (int k : {2, 10}) {
            const int m = 1, b = 50;
            const double stable = stable_rate(mode, k);
            const long len = TrainingPlan::make(mode, k, m).total_slots;
            const double limit = b / (len * stable + b) * stable;
            CHECK(eta_periodic(mode, k, m, b, 1e-12) == Approx(limit).epsilon(1e-6));
            CHECK(eta_periodic(mode, k, m, b, 0.0) == Approx(limit).epsilon(1e-12));
        }
    }
}

TEST_CASE("hand-evaluated periodic and tracker points", "[protocol]") {
    // K=10, M=1 (20 training slots), B=100, p -> 0: 100/1020.
    CHECK(eta_periodic(Mode::tdma, 10, 1, 100, 1e-12) ==
          Approx(100.0 / 1020.0).epsilon(1e-6));
    // K=10, M=1, no blanks, p=0.01: eta = 0.1 / (0.01 + 0.99^-20).
    CHECK(eta_tracker(Mode::tdma, 10, 1, 0, 0.01) ==
          Approx(0.08112714917831876).epsilon(1e-12));
}

TEST_CASE("certain change every slot silences the channel", "[protocol]") {
    CHECK(eta_periodic(Mode::tdma, 5, 1, 20, 1.0) == 0.0);
    CHECK(eta_periodic(Mode::fd, 5, 1, 20, 1.0) == 0.0);
}

TEST_CASE("collapsed formulas match term-by-term summation", "[protocol][oracle]") {
    Rng rng(41);
    std::uniform_real_distribution<double> prob(1e-5, 0.2);
    std::uniform_int_distribution<int> units(1, 15);
    std::uniform_int_distribution<int> bits(1, 400);
    std::uniform_int_distribution<int> m(1, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = units(rng), b = bits(rng), mm = m(rng);
        const double p = prob(rng);
        CHECK(eta_periodic(Mode::tdma, k, mm, b, p) ==
              Approx(oracles::eta_periodic_sum_tdma(k, mm, b, p)).epsilon(1e-12));
        CHECK(eta_periodic(Mode::fd, k, mm, b, p) ==
              Approx(oracles::eta_periodic_sum_fd(k, mm, b, p)).epsilon(1e-12));
    }
}

TEST_CASE("rarer changes justify longer data phases", "[protocol][property]") {
    for (Mode mode : {Mode::tdma, Mode::fd}) {
        int previous = 0;
        for (double lambda : {1e-2, 1e-3, 1e-4}) {
            const double p = -std::expm1(-lambda);
            const int best = optimal_bits_per_phase(mode, 10, 1, p);
            CHECK(best > previous);
            previous = best;
        }
    }
}

TEST_CASE("full duplex needs longer data phases than TDMA", "[protocol][property]") {
    for (int k : {5, 10, 15}) {
        const double p = -std::expm1(-1e-3);
        CHECK(optimal_bits_per_phase(Mode::fd, k, 1, p) >=
              optimal_bits_per_phase(Mode::tdma, k, 1, p));
    }
}

TEST_CASE("coarse search equals exhaustive search", "[protocol][oracle]") {
    const double p = 0.5;
    int best_b = 1;
    double best = 0.0;
    for (int b = 1; b <= 10000; ++b) {
        const double eta = eta_periodic(Mode::tdma, 2, 1, b, p);
        if (eta > best) {
            best = eta;
            best_b = b;
        }
    }
    CHECK(optimal_bits_per_phase(Mode::tdma, 2, 1, p) == best_b);
}

TEST_CASE("tracker rate equals the stable rate exactly at p=0", "[protocol]") {
    for (Mode mode : {Mode::tdma, Mode::fd})
        for (int k : {1, 2, 7, 15})
            CHECK(eta_tracker(mode, k, 1, 5, 0.0) == stable_rate(mode, k));
}

TEST_CASE("blank slots only ever slow the tracker", "[protocol][property]") {
    double previous = 1.0;
    for (int blanks : {0, 5, 20, 100}) {
        const double eta = eta_tracker(Mode::tdma, 5, 1, blanks, 0.02);
        CHECK(eta < previous);
        previous = eta;
    }
}

TEST_CASE("expected recovery length closed form", "[protocol]") {
    CHECK(expected_retraining_length(10, 5, 0.0) == 15.0);
    CHECK(expected_retraining_length(2, 0, 0.5) == Approx(6.0).epsilon(1e-12));
}

TEST_CASE("recovery length matches the absorbing-chain simulation",
          "[protocol][statistical]") {
    Rng rng(43);
    for (int total : {5, 20}) {
        for (double p : {1e-2, 0.1}) {
            const double expected = expected_retraining_length(total, 0, p);
            double sum = 0.0;
            const long episodes = 200000;
            for (long e = 0; e < episodes; ++e)
                sum += oracles::chain_episode(total, p, rng);
            CHECK(sum / episodes == Approx(expected).epsilon(0.01));
        }
    }
}

TEST_CASE("telescoped chain episodes agree with the slot-level walk",
          "[protocol][statistical]") {
    Rng a(47), b(47);
    const int total = 12;
    const double p = 0.07;
    double slow = 0.0, fast = 0.0;
    const long episodes = 100000;
    for (long e = 0; e < episodes; ++e) slow += oracles::chain_episode(total, p, a);
    for (long e = 0; e < episodes; ++e) fast += oracles::chain_episode_fast(total, p, b);
    CHECK(slow / episodes == Approx(fast / episodes).epsilon(0.02));
}

TEST_CASE("recovery-length route reproduces the tracker formula",
          "[protocol][property]") {
    Rng rng(53);
    std::uniform_real_distribution<double> prob(1e-6, 0.3);
    std::uniform_int_distribution<int> units(1, 15);
    std::uniform_int_distribution<int> blanks(0, 30);
    std::uniform_int_distribution<int> m(1, 3);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = units(rng), mm = m(rng), bs = blanks(rng);
        const double p = prob(rng);
        for (Mode mode : {Mode::tdma, Mode::fd}) {
            const auto plan = TrainingPlan::make(mode, k, mm, bs);
            const double expected =
                expected_retraining_length(plan.total_slots, plan.blank_slots, p);
            const double via_length =
                eta_from_expected_retraining(stable_rate(mode, k), p, expected);
            CHECK(via_length == Approx(eta_tracker(mode, k, mm, bs, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("net rates never exceed the stable rate", "[protocol][property]") {
    Rng rng(59);
    std::uniform_real_distribution<double> prob(0.0, 0.5);
    std::uniform_int_distribution<int> units(1, 15);
    std::uniform_int_distribution<int> bits(1, 500);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = units(rng), b = bits(rng);
        const double p = prob(rng);
        for (Mode mode : {Mode::tdma, Mode::fd}) {
            const double cap = stable_rate(mode, k) * (1.0 + 1e-12);
            CHECK(eta_periodic(mode, k, 1, b, p) <= cap);
            CHECK(eta_tracker(mode, k, 1, 3, p) <= cap);
        }
    }
}

TEST_CASE("reception rate bookkeeping", "[protocol]") {
    CHECK(reception_rate(0.25, 1) == 0.0);
    CHECK(reception_rate(0.1, 5) == Approx(0.4));

    // TDMA reception saturates below one bit per unit per slot.
    const double eta = eta_periodic(Mode::tdma, 10, 1, 1000000, 1e-12);
    const double mu = reception_rate(eta, 10);
    CHECK(mu < 1.0);
    CHECK(mu == Approx(0.9).epsilon(1e-3));

    // Full duplex clears the TDMA reception ceiling at practical settings.
    const double p = -std::expm1(-1e-3);
    const double eta_fd = eta_periodic(Mode::fd, 10, 1,
                                       optimal_bits_per_phase(Mode::fd, 10, 1, p), p);
    const double eta_td = eta_periodic(Mode::tdma, 10, 1,
                                       optimal_bits_per_phase(Mode::tdma, 10, 1, p), p);
    CHECK(reception_rate(eta_fd, 10) > reception_rate(eta_td, 10));
}
