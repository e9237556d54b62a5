#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "powertalk/detection.hpp"
#include "powertalk/grid.hpp"
#include "powertalk/protocol.hpp"
#include "powertalk/signaling.hpp"

namespace powertalk {

enum class ProtocolVariant { periodic, tracker };
enum class LossModel {
    worst_case,  // a load change voids every slot until the next completed training
    realistic    // stale spaces keep demodulating and produce errors instead
};
enum class Phase { training, blank, data };

inline const char* to_string(ProtocolVariant v) {
    return v == ProtocolVariant::periodic ? "periodic" : "tracker";
}
inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::training: return "training";
        case Phase::blank: return "blank";
        default: return "data";
    }
}

struct ProtocolConfig {
    ProtocolVariant variant = ProtocolVariant::periodic;
    double lambda = 0.0;     // expected load changes per slot
    int bits_per_phase = 1;  // B, periodic data-phase bits per unit
    int blank_slots = 0;     // L_BS, tracker recovery lead-in
    int m_per_point = 1;     // M, training slots per detection point
    // Tracker change detector; the default is the ideal detector (every
    // change caught in its slot, no false alarms).
    double miss_rate = 0.0;
    double false_alarm_rate = 0.0;
    LossModel loss = LossModel::worst_case;
    SpaceSource source = SpaceSource::learned;

    double change_probability() const;
};

/// One row of the slot-by-slot trace stream.
struct SlotTrace {
    long slot = 0;
    Phase phase = Phase::training;
    double r = 0.0;
    bool load_changed = false;
    bool voided = false;             // struck by the worst-case loss model
    std::vector<int8_t> sent;        // per-unit channel bit; -1 = nominal hold
    std::vector<int> decisions;      // per-unit decision; -1 = none this slot
};

using TraceSink = std::function<void(const SlotTrace&)>;

struct SimReport {
    long slots = 0;
    long training_slots = 0;
    long blank_slot_count = 0;
    long data_slots = 0;
    long data_slots_delivered = 0;  // intact under the active loss model
    long data_slots_lost = 0;
    long load_changes = 0;

    /// Bits each unit got through while detection spaces were intact; eta
    /// counts these, reception-quality fields below count noise effects.
    std::vector<long> delivered_bits;
    double eta = 0.0;  // delivered bits per unit per slot
    double mu = 0.0;   // (units - 1) * eta under symmetric traffic

    long decisions = 0;
    long decision_errors = 0;
    long blocks_decoded = 0;   // FD receiver-side block decodes
    long blocks_failed = 0;    // no-preimage weight sequences
    long bits_received = 0;    // receiver-side information bits
    long bit_errors = 0;

    double min_v_star = std::numeric_limits<double>::infinity();
    double max_v_star = -std::numeric_limits<double>::infinity();
    double min_current = std::numeric_limits<double>::infinity();
    double max_current = -std::numeric_limits<double>::infinity();
    long constraint_violations = 0;
};

/// Slot-level discrete-event simulation of one grid running the chosen
/// protocol. Per-slot draw order: load change (and new value), source bits
/// when a transmission starts, then observation noise in receiver order;
/// identical seeds replay identical traces.
SimReport run_simulation(const GridConfig& config, const Constellation& constellation,
                         Mode mode, const ProtocolConfig& protocol, long n_slots,
                         Rng& rng, const TraceSink& sink = {});

/// One cell of the closed-form cross-validation grid.
struct VerifyCell {
    Mode mode = Mode::tdma;
    ProtocolVariant variant = ProtocolVariant::periodic;
    int units = 2;
    double lambda = 0.0;
    int m_per_point = 1;
    int bits_per_phase = 0;  // 0: use optimal_bits_per_phase
    int blank_slots = 0;
    long slots = 1000000;
    uint64_t seed = 1;
    double gamma = 0.1;       // constellation budget for the run
    int formula_m = 0;        // 0: same M as the simulator (mismatch = negative control)
};

struct VerifyRow {
    VerifyCell cell;
    int bits_per_phase = 0;   // resolved B
    double closed_form = 0.0;
    double simulated = 0.0;
    double rel_error = 0.0;
    bool pass = false;
};

/// Runs the simulator on every cell and compares against the matching
/// closed form at the given relative tolerance.
std::vector<VerifyRow> verify_against_closed_forms(const GridConfig& base,
                                                   std::span<const VerifyCell> cells,
                                                   double tolerance = 0.02,
                                                   int workers = 1);

}  // namespace powertalk
