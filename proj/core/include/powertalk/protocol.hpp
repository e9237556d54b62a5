#pragma once

#include "powertalk/types.hpp"

namespace powertalk {

/// Training-phase accounting: every receiver relearns its detection space
/// from M dedicated slots per point, giving 2*M*K slots for TDMA and
/// 2*M*K^2 for full duplex; the tracker protocol prepends blank slots.
struct TrainingPlan {
    Mode mode = Mode::tdma;
    int m_per_point = 1;   // M
    int total_slots = 0;   // L
    int blank_slots = 0;   // L_BS (tracker recovery only)

    static TrainingPlan make(Mode mode, int units, int m_per_point, int blank_slots = 0);
};

/// Net transmission rate per unit per slot for the periodic protocol:
/// fixed cycles of L training slots plus a data phase carrying B bits per
/// unit, with the worst-case loss model (the first load change in a cycle
/// voids everything from that slot to the end of the cycle).
double eta_periodic(Mode mode, int units, int m_per_point, int bits_per_phase, double p);

/// Data-phase length maximizing eta_periodic; the search walks B upward and
/// stops after the rate has stayed below the best for 1000 consecutive
/// values. Returns the smallest maximizer.
int optimal_bits_per_phase(Mode mode, int units, int m_per_point, double p);

/// Net transmission rate for the tracker protocol: transmission pauses on
/// every detected change, waits L_BS blank slots, retrains (restarting the
/// whole recovery on any further change), then resumes.
double eta_tracker(Mode mode, int units, int m_per_point, int blank_slots, double p);

/// Expected recovery length: mean number of slots until L + L_BS
/// uninterrupted slots have elapsed when each slot is interrupted with
/// probability p (absorbing-chain mean absorption time).
double expected_retraining_length(int training_slots, int blank_slots, double p);

/// Tracker rate written in terms of the expected recovery length; feeding
/// expected_retraining_length into this reproduces eta_tracker.
double eta_from_expected_retraining(double stable, double p, double expected_length);

/// Net reception rate per unit: bits observed about the other units.
double reception_rate(double eta, int units);

}  // namespace powertalk
