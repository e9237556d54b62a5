#pragma once

#include <vector>

#include "powertalk/grid.hpp"
#include "powertalk/signaling.hpp"
#include "powertalk/types.hpp"

namespace powertalk {

/// One expected receiver output. TDMA: `label` is the active unit's bit and
/// `own_bit` is unused. FD: `own_bit` is the receiver's transmitted bit and
/// `label` the Hamming weight of the other units' bits.
struct DetectionPoint {
    double v_star = 0.0;
    double i = 0.0;
    int own_bit = 0;
    int label = 0;
    double prior = 0.0;
};

/// Decision boundary v = slope * i + intercept in observation coordinates.
struct BoundaryLine {
    double slope = 0.0;
    double intercept = 0.0;

    double at(double i) const { return slope * i + intercept; }
};

enum class SpaceSource { oracle, learned };

/// A receiver's expected output points for one load value, plus the noise
/// model the decision rules need. Immutable after construction.
///
/// TDMA holds one point pair per possible active transmitter (the pairs
/// coincide for homogeneous grids); FD holds one point per (own bit,
/// others' Hamming weight) class, 2K in total.
class DetectionSpace {
public:
    Mode mode() const { return mode_; }
    int receiver() const { return receiver_; }
    int units() const { return units_; }
    double load() const { return load_; }
    double sigma_v() const { return sigma_v_; }
    double sigma_i() const { return sigma_i_; }
    /// Slots the training schedule occupied (0 when built from the oracle).
    long training_slots() const { return training_slots_; }

    const DetectionPoint& tdma_point(int transmitter, int bit) const;
    const DetectionPoint& fd_point(int own_bit, int weight) const;
    /// First unit other than the receiver; default transmitter argument.
    int default_transmitter() const { return receiver_ == 0 ? 1 : 0; }

    std::vector<DetectionPoint> all_points() const;

    /// Assembles a space from externally measured points (e.g. training
    /// means collected inside a simulation). TDMA expects points grouped
    /// [transmitter][bit] with the receiver's own group empty; FD expects
    /// [own_bit][weight].
    static DetectionSpace from_points(Mode mode, int receiver, int units, double load,
                                      double sigma_v, double sigma_i,
                                      std::vector<std::vector<DetectionPoint>> points,
                                      long training_slots);

private:
    friend DetectionSpace build_detection_space(const GridConfig&, const Constellation&,
                                                Mode, int, double, SpaceSource, int, Rng*,
                                                double);
    Mode mode_ = Mode::tdma;
    int receiver_ = 0;
    int units_ = 0;
    double load_ = 0.0;
    double sigma_v_ = 0.0;
    double sigma_i_ = 0.0;
    long training_slots_ = 0;
    // TDMA: [transmitter][bit]; FD: [own_bit][weight]
    std::vector<std::vector<DetectionPoint>> points_;
};

/// Oracle source computes the exact points from the steady-state model;
/// learned source averages m_per_point noisy observations per point over
/// the canonical training schedule (one trainer at a time for TDMA, one
/// learner round per unit for FD) and records the schedule length
/// (2*M*K slots for TDMA, 2*M*K^2 for FD). The learned source draws noise
/// only for the slots this receiver records.
DetectionSpace build_detection_space(const GridConfig& config,
                                     const Constellation& constellation, Mode mode,
                                     int receiver, double r, SpaceSource source,
                                     int m_per_point = 1, Rng* rng = nullptr,
                                     double p_one = 0.5);

/// Boundary between the two TDMA points of one transmitter, prior term
/// included. Requires both noise deviations positive.
BoundaryLine tdma_boundary(const DetectionSpace& space, double p_one,
                           int transmitter = -1);

/// Boundary separating the FD points with weights w_a and w_b for the given
/// own bit. Requires both noise deviations positive.
BoundaryLine fd_boundary(const DetectionSpace& space, int own_bit, int w_a, int w_b,
                         double p_one);

/// Bit decision for a TDMA receiver. Ties on the boundary resolve to 1.
/// With a zero noise deviation the rule degenerates to nearest point in the
/// noise-free coordinate (nearest in both when both are zero).
int map_decision_tdma(const DetectionSpace& space, const Observation& y, double p_one,
                      int transmitter = -1);

/// Hamming-weight decision for an FD receiver given its own transmitted
/// bit: the weight whose band between neighboring boundaries contains y.
/// Ties resolve toward the larger weight; zero noise deviations degenerate
/// as in the TDMA rule.
int map_decision_fd(const DetectionSpace& space, const Observation& y, int own_bit,
                    double p_one);

/// Analytic symbol error probabilities, averaged over the uniform load
/// range by quadrature using exact (oracle) detection spaces.
struct ErrorReport {
    std::vector<double> per_unit;  // Pr(e_k)
    double mean_error = 0.0;
    double p_detect = 0.0;  // 1 - mean over units
};

ErrorReport analytic_error_probability(const GridConfig& config,
                                       const Constellation& constellation, Mode mode,
                                       double p_one);

}  // namespace powertalk
