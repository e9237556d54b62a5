#include "powertalk/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "powertalk/numeric.hpp"

namespace powertalk {

namespace {

Symbol pick(const Constellation& c, int bit) { return bit ? c.one : c.zero; }

/// Input vector for one FD training/detection class: the receiver holds
/// `own_bit`, the `weight` lowest-indexed other units hold 1, the rest 0.
std::vector<Symbol> fd_inputs(const GridConfig& cfg, const Constellation& cons,
                              int receiver, int own_bit, int weight) {
    std::vector<Symbol> inputs(cfg.units, cons.zero);
    inputs[receiver] = pick(cons, own_bit);
    int placed = 0;
    for (int u = 0; u < cfg.units && placed < weight; ++u) {
        if (u == receiver) continue;
        inputs[u] = cons.one;
        ++placed;
    }
    return inputs;
}

/// MAP boundary between two Gaussian hypotheses with diagonal covariance.
/// The rule "decide the higher-voltage point iff v >= line(i)" follows from
/// the log-likelihood ratio; swapping the arguments yields the same line.
BoundaryLine line_between(const DetectionPoint& a, const DetectionPoint& b,
                          double prior_a, double prior_b, double sigma_v,
                          double sigma_i) {
    const double dv = b.v_star - a.v_star;  // v_h - v_l with a = l, b = h
    if (dv == 0.0)
        throw std::invalid_argument("detection: boundary undefined for equal voltages");
    const double rho = (sigma_v * sigma_v) / (sigma_i * sigma_i);
    BoundaryLine line;
    line.slope = rho * (a.i - b.i) / dv;
    line.intercept = 0.5 * (a.v_star + b.v_star) +
                     0.5 * rho * (b.i * b.i - a.i * a.i) / dv +
                     sigma_v * sigma_v * std::log(prior_a / prior_b) / dv;
    return line;
}

/// P(v_noisy < line(i_noisy)) for an observation centered at (cv, ci).
double below_line_prob(const BoundaryLine& line, double cv, double ci, double sigma_v,
                       double sigma_i) {
    const double s = std::sqrt(sigma_v * sigma_v + line.slope * line.slope * sigma_i * sigma_i);
    return normal_cdf((line.at(ci) - cv) / s);
}

/// P(lower(i) < v < upper(i)) for an observation centered at (cv, ci); the
/// two boundaries need not be parallel, so reduce to a 1-D integral over
/// the current coordinate.
double band_prob(const BoundaryLine& upper, const BoundaryLine& lower, double cv,
                 double ci, double sigma_v, double sigma_i) {
    const double inv_norm = 1.0 / (sigma_i * std::sqrt(2.0 * std::numbers::pi_v<double>));
    auto integrand = [&](double t) {
        const double z = (t - ci) / sigma_i;
        const double hi = normal_cdf((upper.at(t) - cv) / sigma_v);
        const double lo = normal_cdf((lower.at(t) - cv) / sigma_v);
        return inv_norm * std::exp(-0.5 * z * z) * std::max(0.0, hi - lo);
    };
    return adaptive_simpson(integrand, ci - 12.0 * sigma_i, ci + 12.0 * sigma_i, 1e-12);
}

int nearest_label(const std::vector<const DetectionPoint*>& pts, const Observation& y,
                  double sigma_v, double sigma_i) {
    // Zero-noise limit of the MAP rule: classify by the noise-free
    // coordinate alone; ties go to the larger label.
    auto key = [&](const DetectionPoint& p) {
        if (sigma_i == 0.0 && sigma_v == 0.0) {
            const double dv = y.v - p.v_star, di = y.i - p.i;
            return dv * dv + di * di;
        }
        if (sigma_i == 0.0) return std::abs(y.i - p.i);
        return std::abs(y.v - p.v_star);
    };
    int best = pts.front()->label;
    double best_key = key(*pts.front());
    for (size_t j = 1; j < pts.size(); ++j) {
        const double k = key(*pts[j]);
        if (k <= best_key) {
            best_key = k;
            best = pts[j]->label;
        }
    }
    return best;
}

}  // namespace

const DetectionPoint& DetectionSpace::tdma_point(int transmitter, int bit) const {
    if (mode_ != Mode::tdma)
        throw std::invalid_argument("detection: not a TDMA space");
    if (transmitter < 0) transmitter = default_transmitter();
    if (transmitter == receiver_ || transmitter >= units_)
        throw std::invalid_argument("detection: bad transmitter index");
    return points_[transmitter][bit];
}

const DetectionPoint& DetectionSpace::fd_point(int own_bit, int weight) const {
    if (mode_ != Mode::fd) throw std::invalid_argument("detection: not an FD space");
    if (own_bit < 0 || own_bit > 1 || weight < 0 || weight >= units_)
        throw std::invalid_argument("detection: bad point index");
    return points_[own_bit][weight];
}

DetectionSpace DetectionSpace::from_points(Mode mode, int receiver, int units,
                                           double load, double sigma_v, double sigma_i,
                                           std::vector<std::vector<DetectionPoint>> points,
                                           long training_slots) {
    DetectionSpace space;
    space.mode_ = mode;
    space.receiver_ = receiver;
    space.units_ = units;
    space.load_ = load;
    space.sigma_v_ = sigma_v;
    space.sigma_i_ = sigma_i;
    space.points_ = std::move(points);
    space.training_slots_ = training_slots;
    return space;
}

std::vector<DetectionPoint> DetectionSpace::all_points() const {
    std::vector<DetectionPoint> out;
    for (int g = 0; g < (int)points_.size(); ++g) {
        if (mode_ == Mode::tdma && g == receiver_) continue;
        out.insert(out.end(), points_[g].begin(), points_[g].end());
    }
    return out;
}

DetectionSpace build_detection_space(const GridConfig& cfg, const Constellation& cons,
                                     Mode mode, int receiver, double r,
                                     SpaceSource source, int m_per_point, Rng* rng,
                                     double p_one) {
    cfg.validate();
    if (receiver < 0 || receiver >= cfg.units)
        throw std::invalid_argument("detection: receiver index out of range");
    if (!(r >= cfg.r_load_min && r <= cfg.r_load_max))
        throw std::invalid_argument("detection: load outside the configured range");
    if (source == SpaceSource::learned && (rng == nullptr || m_per_point < 1))
        throw std::invalid_argument("detection: learned source needs a generator and M >= 1");

    DetectionSpace space;
    space.mode_ = mode;
    space.receiver_ = receiver;
    space.units_ = cfg.units;
    space.load_ = r;
    space.sigma_v_ = cfg.sigma_v;
    space.sigma_i_ = cfg.sigma_i;

    auto measure = [&](std::span<const Symbol> inputs) {
        const auto st = solve_steady_state(cfg, inputs, r);
        if (source == SpaceSource::oracle)
            return Observation{st.v_star, st.current[receiver]};
        Observation mean;
        for (int m = 0; m < m_per_point; ++m) {
            const auto y = observe(st, receiver, cfg, *rng);
            mean.v += y.v;
            mean.i += y.i;
        }
        mean.v /= m_per_point;
        mean.i /= m_per_point;
        return mean;
    };

    if (mode == Mode::tdma) {
        space.points_.resize(cfg.units);
        for (int trainer = 0; trainer < cfg.units; ++trainer) {
            if (trainer == receiver) continue;  // own slots teach the others
            space.points_[trainer].resize(2);
            for (int b = 0; b < 2; ++b) {
                std::vector<Symbol> inputs = cfg.nominal;
                inputs[trainer] = pick(cons, b);
                const auto y = measure(inputs);
                space.points_[trainer][b] =
                    DetectionPoint{y.v, y.i, 0, b, b ? p_one : 1.0 - p_one};
            }
        }
        if (source == SpaceSource::learned)
            space.training_slots_ = 2L * m_per_point * cfg.units;
    } else {
        space.points_.assign(2, std::vector<DetectionPoint>(cfg.units));
        for (int b = 0; b < 2; ++b) {
            for (int w = 0; w < cfg.units; ++w) {
                const auto inputs = fd_inputs(cfg, cons, receiver, b, w);
                const auto y = measure(inputs);
                space.points_[b][w] = DetectionPoint{
                    y.v, y.i, b, w, binomial_pmf(cfg.units - 1, w, p_one)};
            }
        }
        if (source == SpaceSource::learned)
            space.training_slots_ = 2L * m_per_point * cfg.units * cfg.units;
    }
    return space;
}

BoundaryLine tdma_boundary(const DetectionSpace& space, double p_one, int transmitter) {
    if (!(space.sigma_v() > 0.0 && space.sigma_i() > 0.0))
        throw std::invalid_argument("detection: boundary needs positive noise deviations");
    const auto& s0 = space.tdma_point(transmitter, 0);
    const auto& s1 = space.tdma_point(transmitter, 1);
    return line_between(s1, s0, p_one, 1.0 - p_one, space.sigma_v(), space.sigma_i());
}

BoundaryLine fd_boundary(const DetectionSpace& space, int own_bit, int w_a, int w_b,
                         double p_one) {
    if (!(space.sigma_v() > 0.0 && space.sigma_i() > 0.0))
        throw std::invalid_argument("detection: boundary needs positive noise deviations");
    const auto& a = space.fd_point(own_bit, w_a);
    const auto& b = space.fd_point(own_bit, w_b);
    const int n = space.units() - 1;
    return line_between(a, b, binomial_pmf(n, w_a, p_one), binomial_pmf(n, w_b, p_one),
                        space.sigma_v(), space.sigma_i());
}

int map_decision_tdma(const DetectionSpace& space, const Observation& y, double p_one,
                      int transmitter) {
    const auto& s0 = space.tdma_point(transmitter, 0);
    const auto& s1 = space.tdma_point(transmitter, 1);
    if (space.sigma_v() > 0.0 && space.sigma_i() > 0.0) {
        const auto line =
            line_between(s1, s0, p_one, 1.0 - p_one, space.sigma_v(), space.sigma_i());
        const bool above = y.v >= line.at(y.i);
        return (s1.v_star > s0.v_star) == above ? 1 : 0;
    }
    return nearest_label({&s0, &s1}, y, space.sigma_v(), space.sigma_i());
}

int map_decision_fd(const DetectionSpace& space, const Observation& y, int own_bit,
                    double p_one) {
    const int n_points = space.units();
    if (n_points == 1) return 0;
    if (space.sigma_v() > 0.0 && space.sigma_i() > 0.0) {
        // The bands are ordered by bus voltage, so the weight estimate is
        // the number of neighbor boundaries lying at or below the sample.
        int count = 0;
        for (int w = 0; w + 1 < n_points; ++w) {
            const auto line = fd_boundary(space, own_bit, w + 1, w, p_one);
            if (y.v >= line.at(y.i)) ++count;
        }
        return count;
    }
    std::vector<const DetectionPoint*> pts(n_points);
    for (int w = 0; w < n_points; ++w) pts[w] = &space.fd_point(own_bit, w);
    return nearest_label(pts, y, space.sigma_v(), space.sigma_i());
}

ErrorReport analytic_error_probability(const GridConfig& cfg, const Constellation& cons,
                                       Mode mode, double p_one) {
    cfg.validate();
    ErrorReport report;
    report.per_unit.assign(cfg.units, 0.0);
    if (cfg.units == 1 || cfg.sigma_v == 0.0 || cfg.sigma_i == 0.0) {
        report.p_detect = 1.0;  // a lone unit never errs; so does a noiseless one
        return report;
    }

    const double w_bit[2] = {1.0 - p_one, p_one};
    for (int k = 0; k < cfg.units; ++k) {
        report.per_unit[k] = uniform_mean(cfg.r_load_min, cfg.r_load_max, [&](double r) {
            const auto space = build_detection_space(cfg, cons, mode, k, r,
                                                     SpaceSource::oracle, 1, nullptr, p_one);
            if (mode == Mode::tdma) {
                double err = 0.0;
                int transmitters = 0;
                for (int j = 0; j < cfg.units; ++j) {
                    if (j == k) continue;
                    const auto line = tdma_boundary(space, p_one, j);
                    const auto& s0 = space.tdma_point(j, 0);
                    const auto& s1 = space.tdma_point(j, 1);
                    const double below1 =
                        below_line_prob(line, s1.v_star, s1.i, cfg.sigma_v, cfg.sigma_i);
                    const double below0 =
                        below_line_prob(line, s0.v_star, s0.i, cfg.sigma_v, cfg.sigma_i);
                    err += w_bit[1] * below1 + w_bit[0] * (1.0 - below0);
                    ++transmitters;
                }
                return err / transmitters;
            }
            double err = 0.0;
            for (int b = 0; b < 2; ++b) {
                for (int w = 0; w < cfg.units; ++w) {
                    const auto& pt = space.fd_point(b, w);
                    double correct;
                    if (w == 0) {
                        const auto upper = fd_boundary(space, b, 1, 0, p_one);
                        correct = below_line_prob(upper, pt.v_star, pt.i, cfg.sigma_v,
                                                  cfg.sigma_i);
                    } else if (w == cfg.units - 1) {
                        const auto lower = fd_boundary(space, b, w, w - 1, p_one);
                        correct = 1.0 - below_line_prob(lower, pt.v_star, pt.i,
                                                        cfg.sigma_v, cfg.sigma_i);
                    } else {
                        const auto upper = fd_boundary(space, b, w + 1, w, p_one);
                        const auto lower = fd_boundary(space, b, w, w - 1, p_one);
                        correct = band_prob(upper, lower, pt.v_star, pt.i, cfg.sigma_v,
                                            cfg.sigma_i);
                    }
                    err += w_bit[b] * pt.prior * std::clamp(1.0 - correct, 0.0, 1.0);
                }
            }
            return err;
        });
    }

    for (double e : report.per_unit) report.mean_error += e;
    report.mean_error /= cfg.units;
    report.p_detect = 1.0 - report.mean_error;
    return report;
}

}  // namespace powertalk
