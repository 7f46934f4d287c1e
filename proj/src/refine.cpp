#include "iqpe/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace iqpe {

namespace {

double wrap01(double x) {
    double f = x - std::floor(x);
    return f >= 1.0 ? 0.0 : f;
}

// 4^N * alpha above this leaves less than ~1e-3 of a slot of phase resolution
// in the accumulated rotation angles.
constexpr double kMaxResolvedSpan = 0x1.0p44;

bool resolvable(std::uint64_t alpha, int n_ancilla) {
    return std::ldexp(static_cast<double>(alpha), 2 * n_ancilla) <= kMaxResolvedSpan;
}

}  // namespace

PhaseInterval PhaseInterval::make(double center, double half_width) {
    if (!std::isfinite(center)) throw Error("PhaseInterval: center is not finite");
    if (!(half_width > 0.0 && half_width <= 0.5)) throw Error("PhaseInterval: half_width must be in (0, 0.5]");
    return PhaseInterval{wrap01(center), half_width};
}

double cyclic_offset(double a, double b) {
    double d = b - a;
    d -= std::floor(d + 0.5);
    return d;
}

bool PhaseInterval::contains(double phase, double slack) const {
    if (is_full_circle()) return true;
    return std::abs(cyclic_offset(center, phase)) <= half_width + slack;
}

bool PhaseInterval::contains(const PhaseInterval& inner, double slack) const {
    if (is_full_circle()) return true;
    if (inner.is_full_circle()) return false;
    const double d = cyclic_offset(center, inner.center);
    return d - inner.half_width >= -half_width - slack && d + inner.half_width <= half_width + slack;
}

std::uint64_t optimal_alpha(int n, int n_ancilla) {
    if (n < 0) throw Error("optimal_alpha: iteration index must be non-negative");
    if (n_ancilla < 1 || n_ancilla > kMaxAncilla) throw Error("optimal_alpha: n_ancilla out of range");
    const std::uint64_t base = (std::uint64_t{1} << n_ancilla) - 1;
    std::uint64_t alpha = 1;
    for (int k = 0; k < n; ++k) {
        if (alpha > std::numeric_limits<std::uint64_t>::max() / base) {
            std::ostringstream os;
            os << "optimal_alpha: (2^" << n_ancilla << " - 1)^" << n << " overflows 64 bits";
            throw Error(os.str());
        }
        alpha *= base;
    }
    return alpha;
}

double error_bound(std::size_t c_slots, int n_ancilla, int n) {
    if (c_slots == 0 || n < 0 || n_ancilla < 1) throw Error("error_bound: inputs must be positive");
    const double slots = std::ldexp(1.0, n_ancilla);
    return static_cast<double>(c_slots) / (slots * std::pow(slots - 1.0, n));
}

CombFamily::CombFamily(std::size_t y, std::size_t plateau_start, std::size_t c_slots,
                       std::uint64_t alpha, int n_ancilla)
    : y_(y), plateau_start_(plateau_start), c_slots_(c_slots), alpha_(alpha), n_ancilla_(n_ancilla) {
    if (n_ancilla < 1 || n_ancilla > kMaxAncilla) throw Error("CombFamily: n_ancilla out of range");
    const std::size_t slots = std::size_t{1} << n_ancilla;
    if (alpha == 0) throw Error("CombFamily: alpha must be a positive integer");
    if (y >= slots || plateau_start >= slots) throw Error("CombFamily: slot index out of range");
    if (c_slots == 0 || c_slots > slots) throw Error("CombFamily: plateau size must be in [1, 2^N]");
}

double CombFamily::stripe_width() const noexcept {
    return static_cast<double>(c_slots_) / std::ldexp(static_cast<double>(alpha_), n_ancilla_);
}

double CombFamily::neighbor_gap() const noexcept {
    return 1.0 / static_cast<double>(alpha_) - stripe_width();
}

PhaseInterval CombFamily::stripe(std::uint64_t k) const {
    // center = (2 start + C - 1 + 2 k 2^N) / (2^{N+1} alpha); the numerator is an
    // exact integer so the center carries a single rounding.
    const std::uint64_t slots = std::uint64_t{1} << n_ancilla_;
    const double numerator = static_cast<double>(2 * plateau_start_ + c_slots_ - 1) +
                             2.0 * static_cast<double>(k % alpha_) * static_cast<double>(slots);
    const double denominator = std::ldexp(static_cast<double>(alpha_), n_ancilla_ + 1);
    const double half = std::min(0.5, static_cast<double>(c_slots_) / denominator);
    return PhaseInterval{wrap01(numerator / denominator), half};
}

CombFamily comb_from_outcome(const PeakReport& report, std::uint64_t alpha, int n_ancilla) {
    if (report.n_slots != (std::size_t{1} << n_ancilla)) {
        throw Error("comb_from_outcome: peak report was taken on a different register size");
    }
    return CombFamily(report.y, report.plateau_start, report.c_slots, alpha, n_ancilla);
}

std::string to_string(RefinementFailure kind) {
    switch (kind) {
        case RefinementFailure::NoOverlap: return "NoOverlap";
        case RefinementFailure::AmbiguousOverlap: return "AmbiguousOverlap";
        case RefinementFailure::IterationCap: return "IterationCap";
        case RefinementFailure::PrecisionLimit: return "PrecisionLimit";
        case RefinementFailure::NoProgress: return "NoProgress";
    }
    return "Unknown";
}

PhaseInterval intersect(const PhaseInterval& prev, const CombFamily& comb) {
    if (prev.is_full_circle()) throw Error("intersect: previous estimate must be narrower than the full circle");

    const double alpha = static_cast<double>(comb.alpha());
    const PhaseInterval first = comb.stripe(0);
    const double stripe_half = first.half_width;
    const double touch = 1e-9 * 2.0 * stripe_half;

    // Only stripes whose centers fall within prev +- stripe can meet prev.
    const double reach = prev.half_width + stripe_half;
    const double d0 = wrap01(prev.center - first.center);
    const double k_lo = std::floor((d0 - reach) * alpha) - 1.0;
    const double k_hi = std::ceil((d0 + reach) * alpha) + 1.0;
    std::vector<std::uint64_t> candidates;
    if (k_hi - k_lo + 1.0 >= alpha) {
        for (std::uint64_t k = 0; k < comb.alpha(); ++k) candidates.push_back(k);
    } else {
        for (double k = k_lo; k <= k_hi; k += 1.0) {
            const double reduced = k - alpha * std::floor(k / alpha);
            candidates.push_back(static_cast<std::uint64_t>(reduced));
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    }

    struct Overlap {
        double lo, hi;  // relative to prev.center
        bool whole_stripe;
        PhaseInterval stripe;
    };
    std::vector<Overlap> overlaps;
    for (std::uint64_t k : candidates) {
        const PhaseInterval s = comb.stripe(k);
        const double d = cyclic_offset(prev.center, s.center);
        for (double shift : {-1.0, 0.0, 1.0}) {
            const double c = d + shift;
            const double lo = std::max(-prev.half_width, c - s.half_width);
            const double hi = std::min(prev.half_width, c + s.half_width);
            if (hi - lo <= touch) continue;
            const bool whole = c - s.half_width >= -prev.half_width - touch &&
                               c + s.half_width <= prev.half_width + touch;
            overlaps.push_back({lo, hi, whole, s});
        }
    }

    if (overlaps.empty()) {
        throw RefinementError(RefinementFailure::NoOverlap,
                              "intersect: no stripe of the comb meets the previous estimate");
    }
    if (overlaps.size() > 1) {
        std::ostringstream os;
        os << "intersect: " << overlaps.size() << " stripes meet the previous estimate (alpha = "
           << comb.alpha() << ")";
        throw RefinementError(RefinementFailure::AmbiguousOverlap, os.str());
    }
    const Overlap& o = overlaps.front();
    if (o.whole_stripe) return o.stripe;
    return PhaseInterval::make(prev.center + 0.5 * (o.lo + o.hi), 0.5 * (o.hi - o.lo));
}

std::pair<double, double> phase_to_energy(const PhaseInterval& interval, double delta_t) {
    if (!(delta_t > 0.0)) throw Error("phase_to_energy: delta_t must be positive");
    const double scale = 2.0 * std::numbers::pi / delta_t;
    return {scale * interval.lo(), scale * interval.hi()};
}

RefinementTrace run_refinement(const DistributionSource& source, int n_ancilla, double delta_t,
                               const RefinementOptions& opts) {
    QpeConfig{n_ancilla, delta_t, 1.0}.validate();
    if (!(opts.eps_max > 0.0)) throw Error("run_refinement: eps_max must be positive");
    if (!(opts.beta > 0.0 && opts.beta <= 1.0)) throw Error("run_refinement: beta must be in (0, 1]");
    if (opts.max_iterations < 0) throw Error("run_refinement: max_iterations must be non-negative");
    if (opts.mode == SamplingMode::Sampled && opts.shots == 0) throw Error("run_refinement: shots must be >= 1");

    const std::size_t slots = std::size_t{1} << n_ancilla;
    RefinementTrace trace;
    trace.n_ancilla = n_ancilla;
    trace.delta_t = delta_t;

    std::mt19937_64 seeds(opts.seed);
    std::uint64_t alpha = 1;
    std::size_t widest_plateau = 1;
    std::optional<PhaseInterval> estimate;

    for (int n = 0;; ++n) {
        RefinementRecord rec;
        rec.n = n;
        rec.alpha = alpha;

        const OutcomeDistribution exact = source(alpha);
        for (int attempt = 1;; ++attempt) {
            const OutcomeDistribution dist = opts.mode == SamplingMode::Sampled
                                                 ? sample_distribution(exact, opts.shots, seeds())
                                                 : exact;
            const PeakReport peak = detect_peak_plateau(dist, opts.beta);
            const CombFamily comb = comb_from_outcome(peak, alpha, n_ancilla);
            rec.y = peak.y;
            rec.plateau_start = peak.plateau_start;
            rec.c_slots = peak.c_slots;
            rec.attempts = attempt;
            try {
                if (!estimate) {
                    rec.interval = comb.stripe(0);
                } else if (estimate->is_full_circle()) {
                    throw RefinementError(RefinementFailure::AmbiguousOverlap,
                                          "run_refinement: the previous estimate covers every phase");
                } else {
                    rec.interval = intersect(*estimate, comb);
                }
                break;
            } catch (const RefinementError& e) {
                const bool retry = e.kind() == RefinementFailure::NoOverlap &&
                                   opts.mode == SamplingMode::Sampled && attempt <= opts.sampled_retries;
                if (!retry) throw RefinementError(e.kind(), e.what(), trace);
            }
        }

        rec.epsilon = rec.interval.width();
        estimate = rec.interval;
        widest_plateau = std::max(widest_plateau, rec.c_slots);
        trace.iterations.push_back(rec);
        std::tie(trace.energy_low, trace.energy_high) = phase_to_energy(rec.interval, delta_t);

        if (rec.epsilon <= opts.eps_max) return trace;
        if (n >= opts.max_iterations) {
            std::ostringstream os;
            os << "run_refinement: error " << rec.epsilon << " still above " << opts.eps_max << " after "
               << opts.max_iterations << " iterations";
            throw RefinementError(RefinementFailure::IterationCap, os.str(), trace);
        }

        // Largest alpha whose neighbour gap (2^N - C) / (2^N alpha) still
        // covers the current estimate; C = 1 reproduces (2^N - 1)^{n+1}.
        const double bound = static_cast<double>(slots - std::min(widest_plateau, slots)) /
                             (static_cast<double>(slots) * rec.epsilon);
        const double next = std::floor(bound * (1.0 + 1e-9));
        if (!(next > static_cast<double>(alpha))) {
            throw RefinementError(RefinementFailure::NoProgress,
                                  "run_refinement: the uniqueness bound admits no larger alpha", trace);
        }
        if (next >= 0x1.0p63 || !resolvable(static_cast<std::uint64_t>(next), n_ancilla)) {
            throw RefinementError(RefinementFailure::PrecisionLimit,
                                  "run_refinement: next alpha exceeds the resolvable phase span", trace);
        }
        alpha = static_cast<std::uint64_t>(next);
    }
}

RefinementTrace run_refinement(const Propagator& prop, const CVector& eigenstate,
                               const QpeConfig& cfg, const RefinementOptions& opts) {
    cfg.validate();
    if (eigenstate.dim() != prop.dim()) throw DimensionError("run_refinement: eigenstate dimension mismatch");
    if (!eigenstate.is_normalized(1e-12)) throw Error("run_refinement: eigenstate is not normalized");
    const DistributionSource source = [&](std::uint64_t alpha) {
        QpeConfig step = cfg;
        step.alpha = static_cast<double>(alpha);
        return simulate_circuit(prop, eigenstate, step);
    };
    return run_refinement(source, cfg.n_ancilla, cfg.delta_t, opts);
}

}  // namespace iqpe
