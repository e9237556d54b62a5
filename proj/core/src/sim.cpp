#include "powertalk/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <stdexcept>

#include "powertalk/coding.hpp"
#include "powertalk/numeric.hpp"

namespace powertalk {

double ProtocolConfig::change_probability() const { return -std::expm1(-lambda); }

namespace {

constexpr double kBoundSlack = 1e-7;  // float fuzz allowance on closed constraints

struct Accum {
    double v = 0.0;
    double i = 0.0;
    long n = 0;

    void add(const Observation& y) {
        v += y.v;
        i += y.i;
        ++n;
    }
    Observation mean() const { return {v / n, i / n}; }
};

class Simulation {
public:
    Simulation(const GridConfig& cfg, const Constellation& cons, Mode mode,
               const ProtocolConfig& prot, Rng& rng, const TraceSink& sink)
        : cfg_(cfg),
          cons_(cons),
          mode_(mode),
          prot_(prot),
          rng_(rng),
          sink_(sink),
          units_(cfg.units),
          p_change_(prot.change_probability()),
          plan_(TrainingPlan::make(mode, cfg.units, prot.m_per_point, prot.blank_slots)) {
        cfg_.validate();
        if (prot_.bits_per_phase < 1 && prot_.variant == ProtocolVariant::periodic)
            throw std::invalid_argument("simulation: periodic protocol needs B >= 1");
        if (prot_.m_per_point < 1)
            throw std::invalid_argument("simulation: need M >= 1");
        if (mode_ == Mode::fd) {
            codebook_ = UDCodebook::build(units_);
            block_len_ = codebook_->block_length();
            for (int k = 0; k < units_; ++k) decoders_.emplace_back(*codebook_, k);
            block_weights_.assign(units_, std::vector<int>(block_len_, 0));
            block_bits_.assign(units_, 0);
        }
        pending_bit_.assign(units_, -1);
        load_ = 0.5 * (cfg_.r_load_min + cfg_.r_load_max);
        reset_accumulators();
        if (prot_.variant == ProtocolVariant::periodic) {
            const long data = mode_ == Mode::tdma
                                  ? (long)units_ * prot_.bits_per_phase
                                  : (long)block_len_ * prot_.bits_per_phase;
            cycle_len_ = plan_.total_slots + data;
        } else {
            recovery_left_ = plan_.total_slots;  // initial training, no blank lead-in
            in_recovery_ = true;
        }
        report_.delivered_bits.assign(units_, 0);
    }

    SimReport run(long n_slots) {
        for (long t = 0; t < n_slots; ++t) step(t);
        report_.slots = n_slots;
        long total = 0;
        for (long b : report_.delivered_bits) total += b;
        report_.eta = n_slots > 0 ? (double)total / ((double)units_ * n_slots) : 0.0;
        report_.mu = reception_rate(report_.eta, units_);
        return report_;
    }

private:
    // --- per-slot driver -------------------------------------------------

    void step(long t) {
        trace_.slot = t;
        trace_.load_changed = false;
        trace_.voided = false;
        trace_.sent.assign(units_, -1);
        trace_.decisions.assign(units_, -1);

        if (prot_.variant == ProtocolVariant::periodic && slot_in_cycle_ == 0)
            begin_cycle();

        const bool changed = draw_change();
        if (prot_.variant == ProtocolVariant::periodic)
            periodic_slot(changed);
        else
            tracker_slot(changed);

        if (sink_) sink_(trace_);
    }

    bool draw_change() {
        if (p_change_ <= 0.0) return false;
        if (!std::bernoulli_distribution(p_change_)(rng_)) return false;
        load_ = std::uniform_real_distribution<double>(cfg_.r_load_min, cfg_.r_load_max)(rng_);
        ++report_.load_changes;
        trace_.load_changed = true;
        return true;
    }

    // --- periodic protocol ----------------------------------------------

    void begin_cycle() {
        cycle_intact_ = true;
        reset_accumulators();
    }

    void periodic_slot(bool changed) {
        if (changed) cycle_intact_ = false;
        const long L = plan_.total_slots;
        if (slot_in_cycle_ < L) {
            training_slot(slot_in_cycle_);
            if (slot_in_cycle_ == L - 1) {
                build_spaces();
                spaces_ok_ = cycle_intact_;
            }
        } else {
            const long d = slot_in_cycle_ - L;
            const bool intact = prot_.loss == LossModel::worst_case ? cycle_intact_ : true;
            if (mode_ == Mode::tdma) {
                const int tx = (int)(d % units_);
                data_slot_tdma(tx, draw_bit(), intact);
            } else {
                // The periodic schedule is rigid: block positions advance with
                // the cycle whether or not the loss model voided them. A block
                // is intact iff its final slot still is (validity is monotone
                // within a cycle).
                const int t = (int)(d % block_len_);
                if (t == 0) draw_block_bits();
                data_slot_fd(t, intact);
                if (t + 1 == block_len_ && intact) complete_block();
            }
        }
        if (++slot_in_cycle_ == cycle_len_) slot_in_cycle_ = 0;
    }

    // --- tracker protocol -------------------------------------------------

    void tracker_slot(bool changed) {
        bool detected = false;
        if (changed) {
            detected = prot_.miss_rate <= 0.0 ||
                       !std::bernoulli_distribution(prot_.miss_rate)(rng_);
            if (!detected) spaces_ok_ = false;  // stale until a later retraining
        }

        if (in_recovery_) {
            if (changed && detected) {
                recovery_left_ = plan_.total_slots + plan_.blank_slots;  // restart
                recovery_corrupt_ = false;
                reset_accumulators();
                count_recovery_slot();
                return;
            }
            if (changed && !detected) recovery_corrupt_ = true;
            count_recovery_slot();
            if (--recovery_left_ == 0) {
                build_spaces();
                spaces_ok_ = !recovery_corrupt_;
                in_recovery_ = false;
            }
            return;
        }

        // data phase
        if (changed && detected) {
            wasted_data_slot();
            enter_recovery();
            return;
        }
        if (!changed && prot_.false_alarm_rate > 0.0 &&
            std::bernoulli_distribution(prot_.false_alarm_rate)(rng_)) {
            run_data_slot(spaces_ok_);
            enter_recovery();
            return;
        }
        run_data_slot(spaces_ok_ && !(changed && !detected));
    }

    void enter_recovery() {
        in_recovery_ = true;
        recovery_left_ = plan_.total_slots + plan_.blank_slots;
        recovery_corrupt_ = false;
        reset_accumulators();
    }

    void count_recovery_slot() {
        // Recovery runs blanks first, then the training schedule.
        const long training_start = plan_.total_slots;
        if (recovery_left_ > training_start) {
            ++report_.blank_slot_count;
            trace_.phase = Phase::blank;
            observe_steady_state(cfg_.nominal);
        } else {
            training_slot(plan_.total_slots - recovery_left_);
        }
    }

    void wasted_data_slot() {
        // The interrupted transmission repeats after recovery.
        trace_.phase = Phase::data;
        ++report_.data_slots;
        ++report_.data_slots_lost;
        std::vector<Symbol> inputs = cfg_.nominal;
        if (mode_ == Mode::tdma) {
            const int tx = rr_next_;
            if (pending_bit_[tx] < 0) pending_bit_[tx] = draw_bit();
            inputs[tx] = symbol(pending_bit_[tx]);
            trace_.sent[tx] = pending_bit_[tx];
        } else {
            if (block_t_ == 0 && !block_open_) {
                draw_block_bits();
                block_open_ = true;
            }
            for (int u = 0; u < units_; ++u) {
                const int cb = codebook_->word(u, block_bits_[u])[block_t_];
                inputs[u] = symbol(cb);
                trace_.sent[u] = (int8_t)cb;
            }
        }
        observe_steady_state(inputs);
        trace_.voided = true;
    }

    void run_data_slot(bool intact) {
        if (mode_ == Mode::tdma) {
            const int tx = rr_next_;
            if (pending_bit_[tx] < 0) pending_bit_[tx] = draw_bit();
            data_slot_tdma(tx, pending_bit_[tx], intact);
            pending_bit_[tx] = -1;
            rr_next_ = (rr_next_ + 1) % units_;
        } else {
            if (block_t_ == 0 && !block_open_) {
                draw_block_bits();
                block_open_ = true;
            }
            data_slot_fd(block_t_, intact);
            if (block_t_ + 1 == block_len_) {
                if (intact) complete_block();
                block_open_ = false;
                block_t_ = 0;
            } else {
                ++block_t_;
            }
        }
    }

    // --- shared slot bodies -----------------------------------------------

    void training_slot(long index) {
        trace_.phase = Phase::training;
        ++report_.training_slots;
        const int m = prot_.m_per_point;
        std::vector<Symbol> inputs = cfg_.nominal;
        if (mode_ == Mode::tdma) {
            const int trainer = (int)(index / (2 * m));
            const int bit = (int)((index / m) % 2);
            inputs[trainer] = symbol(bit);
            trace_.sent[trainer] = (int8_t)bit;
            const auto st = observe_steady_state(inputs);
            if (prot_.source == SpaceSource::learned) {
                for (int j = 0; j < units_; ++j) {
                    if (j == trainer) continue;
                    tdma_acc_[j][trainer][bit].add(observe(st, j, cfg_, rng_));
                }
            }
        } else {
            const long per_learner = 2L * m * units_;
            const int learner = (int)(index / per_learner);
            const long idx = index % per_learner;
            const int bit = (int)(idx / ((long)m * units_));
            const int weight = (int)((idx / m) % units_);
            inputs.assign(units_, cons_.zero);
            inputs[learner] = symbol(bit);
            int placed = 0;
            for (int u = 0; u < units_ && placed < weight; ++u) {
                if (u == learner) continue;
                inputs[u] = cons_.one;
                ++placed;
            }
            for (int u = 0; u < units_; ++u)
                trace_.sent[u] = (int8_t)(inputs[u] == cons_.one ? 1 : 0);
            const auto st = observe_steady_state(inputs);
            if (prot_.source == SpaceSource::learned)
                fd_acc_[learner][bit][weight].add(observe(st, learner, cfg_, rng_));
        }
    }

    void data_slot_tdma(int tx, int bit, bool intact) {
        trace_.phase = Phase::data;
        ++report_.data_slots;
        std::vector<Symbol> inputs = cfg_.nominal;
        inputs[tx] = symbol(bit);
        trace_.sent[tx] = (int8_t)bit;
        const auto st = observe_steady_state(inputs);
        if (intact) {
            ++report_.data_slots_delivered;
            ++report_.delivered_bits[tx];
            for (int j = 0; j < units_; ++j) {
                if (j == tx) continue;
                const auto y = observe(st, j, cfg_, rng_);
                const int dec = map_decision_tdma(spaces_[j], y, cons_.p_one, tx);
                trace_.decisions[j] = dec;
                ++report_.decisions;
                if (dec != bit) ++report_.decision_errors;
                ++report_.bits_received;
                if (dec != bit) ++report_.bit_errors;
            }
        } else {
            ++report_.data_slots_lost;
            trace_.voided = true;
        }
    }

    void data_slot_fd(int t, bool intact) {
        trace_.phase = Phase::data;
        ++report_.data_slots;
        std::vector<Symbol> inputs(units_);
        std::vector<int> channel_bits(units_);
        for (int u = 0; u < units_; ++u) {
            channel_bits[u] = codebook_->word(u, block_bits_[u])[t];
            inputs[u] = symbol(channel_bits[u]);
            trace_.sent[u] = (int8_t)channel_bits[u];
        }
        const auto st = observe_steady_state(inputs);
        int weight_all = 0;
        for (int b : channel_bits) weight_all += b;

        if (intact) {
            ++report_.data_slots_delivered;
            for (int k = 0; k < units_; ++k) {
                const auto y = observe(st, k, cfg_, rng_);
                const int est = map_decision_fd(spaces_[k], y, channel_bits[k], cons_.p_one);
                block_weights_[k][t] = est;
                trace_.decisions[k] = est;
                ++report_.decisions;
                if (est != weight_all - channel_bits[k]) ++report_.decision_errors;
            }
        } else {
            ++report_.data_slots_lost;
            trace_.voided = true;
        }
    }

    void complete_block() {
        for (int u = 0; u < units_; ++u) ++report_.delivered_bits[u];
        for (int k = 0; k < units_; ++k) {
            const auto decoded = decoders_[k].decode(block_weights_[k]);
            ++report_.blocks_decoded;
            if (!decoded) {
                ++report_.blocks_failed;
                continue;
            }
            int idx = 0;
            for (int u = 0; u < units_; ++u) {
                if (u == k) continue;
                ++report_.bits_received;
                if ((*decoded)[idx] != block_bits_[u]) ++report_.bit_errors;
                ++idx;
            }
        }
    }

    // --- helpers ------------------------------------------------------------

    Symbol symbol(int bit) const { return bit ? cons_.one : cons_.zero; }

    int draw_bit() { return std::bernoulli_distribution(cons_.p_one)(rng_) ? 1 : 0; }

    void draw_block_bits() {
        for (int u = 0; u < units_; ++u) block_bits_[u] = (uint8_t)draw_bit();
    }

    SteadyState observe_steady_state(std::span<const Symbol> inputs) {
        auto st = solve_steady_state(cfg_, inputs, load_);
        trace_.r = load_;
        report_.min_v_star = std::min(report_.min_v_star, st.v_star);
        report_.max_v_star = std::max(report_.max_v_star, st.v_star);
        bool violated = st.v_star < cfg_.v_min - kBoundSlack ||
                        st.v_star > cfg_.v_max + kBoundSlack;
        for (double i : st.current) {
            report_.min_current = std::min(report_.min_current, i);
            report_.max_current = std::max(report_.max_current, i);
            violated = violated || i < -kBoundSlack || i > cfg_.i_max + kBoundSlack;
        }
        if (violated) ++report_.constraint_violations;
        return st;
    }

    void reset_accumulators() {
        if (mode_ == Mode::tdma)
            tdma_acc_.assign(units_, std::vector<std::array<Accum, 2>>(units_));
        else
            fd_acc_.assign(units_, {std::vector<Accum>(units_), std::vector<Accum>(units_)});
    }

    void build_spaces() {
        spaces_.clear();
        spaces_.reserve(units_);
        for (int k = 0; k < units_; ++k) {
            if (prot_.source == SpaceSource::oracle) {
                spaces_.push_back(build_detection_space(cfg_, cons_, mode_, k, load_,
                                                        SpaceSource::oracle, 1, nullptr,
                                                        cons_.p_one));
                continue;
            }
            std::vector<std::vector<DetectionPoint>> points;
            if (mode_ == Mode::tdma) {
                points.resize(units_);
                for (int tr = 0; tr < units_; ++tr) {
                    if (tr == k) continue;
                    points[tr].resize(2);
                    for (int b = 0; b < 2; ++b) {
                        const auto& acc = tdma_acc_[k][tr][b];
                        const auto y = acc.n > 0 ? acc.mean() : Observation{};
                        points[tr][b] = DetectionPoint{
                            y.v, y.i, 0, b, b ? cons_.p_one : 1.0 - cons_.p_one};
                    }
                }
            } else {
                points.assign(2, std::vector<DetectionPoint>(units_));
                for (int b = 0; b < 2; ++b)
                    for (int w = 0; w < units_; ++w) {
                        const auto& acc = fd_acc_[k][b][w];
                        const auto y = acc.n > 0 ? acc.mean() : Observation{};
                        points[b][w] = DetectionPoint{
                            y.v, y.i, b, w,
                            binomial_pmf(units_ - 1, w, cons_.p_one)};
                    }
            }
            spaces_.push_back(DetectionSpace::from_points(mode_, k, units_, load_,
                                                          cfg_.sigma_v, cfg_.sigma_i,
                                                          std::move(points),
                                                          plan_.total_slots));
        }
    }

    // configuration
    GridConfig cfg_;
    Constellation cons_;
    Mode mode_;
    ProtocolConfig prot_;
    Rng& rng_;
    const TraceSink& sink_;
    int units_;
    double p_change_;
    TrainingPlan plan_;
    std::optional<UDCodebook> codebook_;
    std::vector<SumDecoder> decoders_;
    int block_len_ = 0;
    long cycle_len_ = 0;

    // state
    double load_ = 0.0;
    long slot_in_cycle_ = 0;
    bool cycle_intact_ = true;
    bool in_recovery_ = false;
    long recovery_left_ = 0;
    bool recovery_corrupt_ = false;
    bool spaces_ok_ = false;
    int rr_next_ = 0;
    std::vector<int8_t> pending_bit_;
    std::vector<uint8_t> block_bits_;
    bool block_open_ = false;
    int block_t_ = 0;
    std::vector<std::vector<int>> block_weights_;
    std::vector<DetectionSpace> spaces_;
    std::vector<std::vector<std::array<Accum, 2>>> tdma_acc_;
    std::vector<std::array<std::vector<Accum>, 2>> fd_acc_;

    SimReport report_;
    SlotTrace trace_;
};

}  // namespace

SimReport run_simulation(const GridConfig& config, const Constellation& constellation,
                         Mode mode, const ProtocolConfig& protocol, long n_slots,
                         Rng& rng, const TraceSink& sink) {
    if (n_slots < 0) throw std::invalid_argument("simulation: need n_slots >= 0");
    Simulation sim(config, constellation, mode, protocol, rng, sink);
    return sim.run(n_slots);
}

std::vector<VerifyRow> verify_against_closed_forms(const GridConfig& base,
                                                   std::span<const VerifyCell> cells,
                                                   double tolerance, int workers) {
    std::vector<VerifyRow> rows(cells.size());
    auto run_cell = [&](size_t idx) {
        const VerifyCell& cell = cells[idx];
        VerifyRow row;
        row.cell = cell;
        const GridConfig cfg = with_unit_count(base, cell.units);
        const auto cons = design_fixed_rd_constellation(cell.gamma, cell.mode, cfg,
                                                        cfg.nominal.front().v, 0.5);
        ProtocolConfig prot;
        prot.variant = cell.variant;
        prot.lambda = cell.lambda;
        prot.m_per_point = cell.m_per_point;
        prot.blank_slots = cell.blank_slots;
        const double p = prot.change_probability();
        const int formula_m = cell.formula_m > 0 ? cell.formula_m : cell.m_per_point;
        if (cell.variant == ProtocolVariant::periodic) {
            prot.bits_per_phase =
                cell.bits_per_phase > 0
                    ? cell.bits_per_phase
                    : optimal_bits_per_phase(cell.mode, cell.units, formula_m, p);
            row.closed_form =
                eta_periodic(cell.mode, cell.units, formula_m, prot.bits_per_phase, p);
        } else {
            prot.bits_per_phase = 1;
            row.closed_form =
                eta_tracker(cell.mode, cell.units, formula_m, cell.blank_slots, p);
        }
        row.bits_per_phase = prot.bits_per_phase;
        Rng rng(cell.seed);
        const auto rep = run_simulation(cfg, cons, cell.mode, prot, cell.slots, rng);
        row.simulated = rep.eta;
        row.rel_error = std::abs(row.simulated - row.closed_form) /
                        std::max(row.closed_form, 1e-300);
        row.pass = row.rel_error <= tolerance;
        return row;
    };

    if (workers <= 1) {
        for (size_t i = 0; i < cells.size(); ++i) rows[i] = run_cell(i);
        return rows;
    }
    std::vector<std::future<VerifyRow>> futures;
    futures.reserve(cells.size());
    for (size_t i = 0; i < cells.size(); ++i)
        futures.push_back(std::async(std::launch::async, run_cell, i));
    for (size_t i = 0; i < cells.size(); ++i) rows[i] = futures[i].get();
    return rows;
}

}  // namespace powertalk
