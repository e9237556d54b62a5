#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "powertalk/coding.hpp"
#include "powertalk/sim.hpp"

using namespace powertalk;
using Catch::Approx;

namespace {

Constellation designed(double gamma, Mode mode, const GridConfig& cfg) {
    return design_fixed_rd_constellation(gamma, mode, cfg, cfg.nominal.front().v);
}

std::string trace_digest(const GridConfig& cfg, const Constellation& cons, Mode mode,
                         const ProtocolConfig& prot, long slots, uint64_t seed) {
    std::ostringstream os;
    Rng rng(seed);
    run_simulation(cfg, cons, mode, prot, slots, rng, [&](const SlotTrace& t) {
        os << t.slot << '|' << (int)t.phase << '|' << t.r << '|' << t.load_changed << '|'
           << t.voided;
        for (auto b : t.sent) os << ',' << (int)b;
        for (auto d : t.decisions) os << ';' << d;
        os << '\n';
    });
    return os.str();
}

}  // namespace

TEST_CASE("quiet TDMA grid delivers the no-change periodic rate exactly", "[sim]") {
    auto cfg = GridConfig::reference(4);
    cfg.sigma_v = cfg.sigma_i = 0.0;
    const auto cons = designed(0.1, Mode::tdma, cfg);
    ProtocolConfig prot;
    prot.variant = ProtocolVariant::periodic;
    prot.lambda = 0.0;
    prot.bits_per_phase = 10;
    const long cycle = 2 * 4 + 4 * 10;  // training + data
    Rng rng(1);
    const auto rep = run_simulation(cfg, cons, Mode::tdma, prot, 83 * cycle, rng);
    CHECK(rep.eta == Approx(10.0 / cycle).epsilon(1e-12));
    CHECK(rep.eta == Approx(eta_periodic(Mode::tdma, 4, 1, 10, 0.0)).epsilon(1e-12));
    CHECK(rep.decision_errors == 0);
    CHECK(rep.load_changes == 0);
    CHECK(rep.mu == Approx(3.0 * rep.eta));
}

TEST_CASE("quiet FD grid decodes every block and meets the rate limit", "[sim]") {
    auto cfg = GridConfig::reference(3);
    cfg.sigma_v = cfg.sigma_i = 0.0;
    const auto cons = designed(0.1, Mode::fd, cfg);
    ProtocolConfig prot;
    prot.variant = ProtocolVariant::periodic;
    prot.lambda = 0.0;
    prot.bits_per_phase = 7;
    const long cycle = 2 * 9 + 2 * 7;  // 18 training + 14 data slots
    Rng rng(2);
    const auto rep = run_simulation(cfg, cons, Mode::fd, prot, 100 * cycle, rng);
    CHECK(rep.eta == Approx(7.0 / cycle).epsilon(1e-12));
    CHECK(rep.eta == Approx(eta_periodic(Mode::fd, 3, 1, 7, 0.0)).epsilon(1e-12));
    CHECK(rep.blocks_failed == 0);
    CHECK(rep.bit_errors == 0);
    CHECK(rep.blocks_decoded == 100 * 7 * 3);  // per cycle, per receiver
}

TEST_CASE("tracker simulation tracks the closed form at one percent change rate",
          "[sim][slow]") {
    for (Mode mode : {Mode::tdma, Mode::fd}) {
        for (int k : {2, 10}) {
            const auto cfg = GridConfig::reference(k);
            const auto cons = designed(0.1, mode, cfg);
            ProtocolConfig prot;
            prot.variant = ProtocolVariant::tracker;
            prot.lambda = 0.01;
            Rng rng(77);
            const auto rep = run_simulation(cfg, cons, mode, prot, 1000000, rng);
            const double closed = eta_tracker(mode, k, 1, 0, prot.change_probability());
            CHECK(rep.eta == Approx(closed).epsilon(0.02));
        }
    }
}

TEST_CASE("same seed replays the same trace", "[sim]") {
    const auto cfg = GridConfig::reference(3);
    const auto cons = designed(0.1, Mode::fd, cfg);
    ProtocolConfig prot;
    prot.variant = ProtocolVariant::tracker;
    prot.lambda = 0.02;
    const auto a = trace_digest(cfg, cons, Mode::fd, prot, 5000, 1234);
    const auto b = trace_digest(cfg, cons, Mode::fd, prot, 5000, 1234);
    const auto c = trace_digest(cfg, cons, Mode::fd, prot, 5000, 1235);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("noiseless intact slots never misdecide", "[sim]") {
    auto cfg = GridConfig::reference(5);
    cfg.sigma_v = cfg.sigma_i = 0.0;
    for (Mode mode : {Mode::tdma, Mode::fd}) {
        const auto cons = designed(0.1, mode, cfg);
        ProtocolConfig prot;
        prot.variant = ProtocolVariant::periodic;
        prot.lambda = 0.01;  // changes happen, the loss model absorbs them
        prot.bits_per_phase = 20;
        Rng rng(5);
        const auto rep = run_simulation(cfg, cons, mode, prot, 100000, rng);
        CHECK(rep.decision_errors == 0);
        CHECK(rep.bit_errors == 0);
        CHECK(rep.load_changes > 0);
    }
}

TEST_CASE("every slot lands in exactly one phase bucket", "[sim][property]") {
    const auto cfg = GridConfig::reference(4);
    for (Mode mode : {Mode::tdma, Mode::fd}) {
        const auto cons = designed(0.1, mode, cfg);
        for (auto variant : {ProtocolVariant::periodic, ProtocolVariant::tracker}) {
            ProtocolConfig prot;
            prot.variant = variant;
            prot.lambda = 0.02;
            prot.bits_per_phase = 15;
            prot.blank_slots = 4;
            Rng rng(9);
            const long slots = 50000;
            const auto rep = run_simulation(cfg, cons, mode, prot, slots, rng);
            CHECK(rep.training_slots + rep.blank_slot_count + rep.data_slots == slots);
            CHECK(rep.data_slots_delivered + rep.data_slots_lost == rep.data_slots);
            if (variant == ProtocolVariant::periodic) CHECK(rep.blank_slot_count == 0);
        }
    }
}

TEST_CASE("simulated states stay inside the operating limits", "[sim][property]") {
    const auto cfg = GridConfig::reference(4);
    for (Mode mode : {Mode::tdma, Mode::fd}) {
        const auto cons = designed(0.1, mode, cfg);
        ProtocolConfig prot;
        prot.variant = ProtocolVariant::tracker;
        prot.lambda = 0.05;
        Rng rng(13);
        const auto rep = run_simulation(cfg, cons, mode, prot, 100000, rng);
        CHECK(rep.constraint_violations == 0);
        CHECK(rep.min_v_star >= cfg.v_min - 1e-7);
        CHECK(rep.max_v_star <= cfg.v_max + 1e-7);
        CHECK(rep.min_current >= -1e-7);
        CHECK(rep.max_current <= cfg.i_max + 1e-7);
    }
}

TEST_CASE("closed-form verifier reports empty grids and sane cells", "[sim]") {
    const auto base = GridConfig::reference(2);
    CHECK(verify_against_closed_forms(base, {}).empty());

    VerifyCell cell;
    cell.mode = Mode::tdma;
    cell.variant = ProtocolVariant::tracker;
    cell.units = 2;
    cell.lambda = 0.01;
    cell.slots = 200000;
    const auto rows = verify_against_closed_forms(base, {{cell}});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].pass);
    CHECK(rows[0].rel_error <= 0.02);
}

TEST_CASE("mismatched training length fails the verifier", "[sim]") {
    // Negative control: simulator trains with M=2 while the formula assumes
    // M=1, so the comparison must flag the discrepancy.
    const auto base = GridConfig::reference(5);
    VerifyCell cell;
    cell.mode = Mode::fd;
    cell.variant = ProtocolVariant::tracker;
    cell.units = 5;
    cell.lambda = 0.02;
    cell.m_per_point = 2;
    cell.formula_m = 1;
    cell.slots = 300000;
    const auto rows = verify_against_closed_forms(base, {{cell}});
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].pass);
}

TEST_CASE("oracle-source spaces behave like freshly learned ones", "[sim]") {
    auto cfg = GridConfig::reference(3);
    cfg.sigma_v = cfg.sigma_i = 0.0;
    const auto cons = designed(0.1, Mode::fd, cfg);
    ProtocolConfig learned;
    learned.variant = ProtocolVariant::tracker;
    learned.lambda = 0.01;
    ProtocolConfig oracle = learned;
    oracle.source = SpaceSource::oracle;
    Rng ra(21), rb(21);
    const auto rep_l = run_simulation(cfg, cons, Mode::fd, learned, 100000, ra);
    const auto rep_o = run_simulation(cfg, cons, Mode::fd, oracle, 100000, rb);
    // Noise-free learning equals the oracle, so the runs coincide.
    CHECK(rep_l.eta == rep_o.eta);
    CHECK(rep_l.decision_errors == rep_o.decision_errors);
}

TEST_CASE("realistic loss model trades erasures for errors", "[sim]") {
    const auto cfg = GridConfig::reference(3);
    const auto cons = designed(0.1, Mode::tdma, cfg);
    ProtocolConfig worst;
    worst.variant = ProtocolVariant::periodic;
    worst.lambda = 0.02;
    worst.bits_per_phase = 40;
    ProtocolConfig realistic = worst;
    realistic.loss = LossModel::realistic;
    Rng ra(31), rb(31);
    const auto rep_w = run_simulation(cfg, cons, Mode::tdma, worst, 200000, ra);
    const auto rep_r = run_simulation(cfg, cons, Mode::tdma, realistic, 200000, rb);
    CHECK(rep_r.data_slots_lost == 0);
    CHECK(rep_r.eta > rep_w.eta);
    CHECK(rep_r.bit_errors > rep_w.bit_errors);  // stale spaces misread slots
}
