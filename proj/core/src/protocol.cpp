#include "powertalk/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "powertalk/coding.hpp"

namespace powertalk {

namespace {

void check_common(int units, int m_per_point, double p) {
    if (units < 1) throw std::invalid_argument("protocol: need at least one unit");
    if (m_per_point < 1) throw std::invalid_argument("protocol: need M >= 1");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("protocol: p must lie in [0, 1]");
}

}  // namespace

TrainingPlan TrainingPlan::make(Mode mode, int units, int m_per_point, int blank_slots) {
    if (units < 1) throw std::invalid_argument("training plan: need at least one unit");
    if (m_per_point < 1) throw std::invalid_argument("training plan: need M >= 1");
    if (blank_slots < 0) throw std::invalid_argument("training plan: need L_BS >= 0");
    TrainingPlan plan;
    plan.mode = mode;
    plan.m_per_point = m_per_point;
    plan.blank_slots = blank_slots;
    plan.total_slots = mode == Mode::tdma ? 2 * m_per_point * units
                                          : 2 * m_per_point * units * units;
    return plan;
}

double eta_periodic(Mode mode, int units, int m_per_point, int bits_per_phase, double p) {
    check_common(units, m_per_point, p);
    if (bits_per_phase < 1) throw std::invalid_argument("protocol: need B >= 1");
    const long L = TrainingPlan::make(mode, units, m_per_point).total_slots;
    const double log_q = std::log1p(-p);  // -inf at p = 1, handled below

    if (mode == Mode::tdma) {
        const long data = (long)units * bits_per_phase;  // K*B slots per cycle
        if (p == 0.0) return (double)bits_per_phase / (L + data);
        if (p == 1.0) return 0.0;
        const double survive = std::exp((L + 1) * log_q);        // (1-p)^(L+1)
        const double truncated = -std::expm1(data * log_q);      // 1-(1-p)^(KB)
        return survive * truncated / (p * (L + data)) / units;
    }

    const long n = fd_block_length(units);
    const long data = n * bits_per_phase;  // B/eta_S slots per cycle
    if (p == 0.0) return (double)bits_per_phase / (L + data);
    if (p == 1.0) return 0.0;
    const double survive = std::exp((L + n) * log_q);
    const double truncated = -std::expm1(data * log_q);
    const double per_block = -std::expm1(n * log_q);  // 1-(1-p)^n
    return survive * truncated / (per_block * (L + data));
}

int optimal_bits_per_phase(Mode mode, int units, int m_per_point, double p) {
    check_common(units, m_per_point, p);
    int best_b = 1;
    double best = eta_periodic(mode, units, m_per_point, 1, p);
    for (int b = 2; b - best_b <= 1000; ++b) {
        const double eta = eta_periodic(mode, units, m_per_point, b, p);
        if (eta > best) {
            best = eta;
            best_b = b;
        }
    }
    return best_b;
}

double eta_tracker(Mode mode, int units, int m_per_point, int blank_slots, double p) {
    check_common(units, m_per_point, p);
    const TrainingPlan plan = TrainingPlan::make(mode, units, m_per_point, blank_slots);
    const double stable = stable_rate(mode, units);
    if (p == 0.0) return stable;
    const long recovery = plan.total_slots + plan.blank_slots;
    const double grow = std::exp(-recovery * std::log1p(-p));  // (1-p)^-(L+L_BS)
    return stable / (p + grow);
}

double expected_retraining_length(int training_slots, int blank_slots, double p) {
    if (training_slots < 0 || blank_slots < 0)
        throw std::invalid_argument("protocol: slot counts must be >= 0");
    if (!(p >= 0.0 && p < 1.0))
        throw std::invalid_argument("protocol: p must lie in [0, 1)");
    const long total = (long)training_slots + blank_slots;
    if (p == 0.0) return (double)total;
    const double log_q = std::log1p(-p);
    double sum = 0.0;
    for (long l = 1; l <= total; ++l) sum += std::exp(-l * log_q);
    return sum;
}

double eta_from_expected_retraining(double stable, double p, double expected_length) {
    return stable / (1.0 + p * (expected_length + 1.0));
}

double reception_rate(double eta, int units) {
    if (units < 1) throw std::invalid_argument("protocol: need at least one unit");
    return (units - 1) * eta;
}

}  // namespace powertalk
