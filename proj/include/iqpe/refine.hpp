#pragma once

// Iterative refinement of an eigenphase by intersecting the stripe families
// ("combs") that phase estimation produces at growing time spans alpha * dt.
//
// All intervals live on the circle [0, 1): a phase interval is the set
// {center + d mod 1 : |d| <= half_width}.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iqpe/model.hpp"
#include "iqpe/qpe.hpp"

namespace iqpe {

struct PhaseInterval {
    double center = 0.0;      // in [0, 1)
    double half_width = 0.5;  // in (0, 0.5]

    /// Normalizes the center into [0, 1); throws on a half width outside (0, 0.5].
    static PhaseInterval make(double center, double half_width);

    double width() const noexcept { return 2.0 * half_width; }
    /// Unwrapped endpoints center -/+ half_width (may leave [0, 1)).
    double lo() const noexcept { return center - half_width; }
    double hi() const noexcept { return center + half_width; }
    bool is_full_circle() const noexcept { return half_width >= 0.5; }

    /// Cyclic membership with an absolute slack.
    bool contains(double phase, double slack = 0.0) const;
    /// Cyclic inclusion of `inner` in this interval, with an absolute slack.
    bool contains(const PhaseInterval& inner, double slack = 0.0) const;
};

/// Signed cyclic offset b - a, in [-0.5, 0.5).
double cyclic_offset(double a, double b);

/// (2^N - 1)^n, the largest span keeping one stripe per previous estimate.
/// Throws iqpe::Error when the value does not fit in 64 bits.
std::uint64_t optimal_alpha(int n, int n_ancilla);

/// C / (2^N (2^N - 1)^n).
double error_bound(std::size_t c_slots, int n_ancilla, int n);

/// Stripes consistent with a plateau observed at time span alpha * dt:
/// stripe k = [(start - 1/2) / (2^N alpha) + k / alpha,
///             (start + C - 1/2) / (2^N alpha) + k / alpha] mod 1,
/// for k = 0 .. alpha - 1.
class CombFamily {
public:
    CombFamily(std::size_t y, std::size_t plateau_start, std::size_t c_slots,
               std::uint64_t alpha, int n_ancilla);

    std::size_t y() const noexcept { return y_; }
    std::size_t plateau_start() const noexcept { return plateau_start_; }
    std::size_t c_slots() const noexcept { return c_slots_; }
    std::uint64_t alpha() const noexcept { return alpha_; }
    int n_ancilla() const noexcept { return n_ancilla_; }

    std::uint64_t stripe_count() const noexcept { return alpha_; }
    double stripe_width() const noexcept;
    /// Distance between neighbouring stripes, 1/alpha - stripe_width().
    double neighbor_gap() const noexcept;
    PhaseInterval stripe(std::uint64_t k) const;

private:
    std::size_t y_;
    std::size_t plateau_start_;
    std::size_t c_slots_;
    std::uint64_t alpha_;
    int n_ancilla_;
};

CombFamily comb_from_outcome(const PeakReport& report, std::uint64_t alpha, int n_ancilla);

enum class RefinementFailure {
    NoOverlap,         // no stripe meets the previous estimate
    AmbiguousOverlap,  // two or more stripes meet it
    IterationCap,      // eps_max not reached within the iteration budget
    PrecisionLimit,    // the next span would exceed double-precision phase resolution
    NoProgress,        // the uniqueness bound admits no larger alpha
};

std::string to_string(RefinementFailure kind);

struct RefinementRecord {
    int n = 0;
    std::uint64_t alpha = 1;
    std::size_t y = 0;
    std::size_t plateau_start = 0;
    std::size_t c_slots = 1;
    PhaseInterval interval;
    double epsilon = 1.0;  // width of `interval`
    int attempts = 1;      // QPE runs spent on this iteration (retries in sampled mode)
};

struct RefinementTrace {
    int n_ancilla = 0;
    double delta_t = 1.0;
    std::vector<RefinementRecord> iterations;
    double energy_low = 0.0;
    double energy_high = 0.0;

    const RefinementRecord& final_record() const { return iterations.back(); }
};

class RefinementError : public Error {
public:
    RefinementError(RefinementFailure kind, const std::string& what, RefinementTrace partial = {})
        : Error(what), kind_(kind), partial_(std::move(partial)) {}

    RefinementFailure kind() const noexcept { return kind_; }
    const RefinementTrace& partial_trace() const noexcept { return partial_; }

private:
    RefinementFailure kind_;
    RefinementTrace partial_;
};

/// Intersection of the previous estimate with the unique stripe that meets
/// it. Contacts shorter than 1e-9 of a stripe width count as touching, not
/// overlapping; a stripe within that slack of `prev` is returned unclipped.
/// Throws RefinementError (NoOverlap / AmbiguousOverlap); a full-circle
/// `prev` is a contract violation and throws iqpe::Error.
PhaseInterval intersect(const PhaseInterval& prev, const CombFamily& comb);

/// Energy window [2 pi lo / dt, 2 pi hi / dt] from the unwrapped endpoints.
std::pair<double, double> phase_to_energy(const PhaseInterval& interval, double delta_t);

enum class SamplingMode { Exact, Sampled };

struct RefinementOptions {
    double eps_max = 1e-3;
    SamplingMode mode = SamplingMode::Exact;
    std::uint64_t shots = 100000;
    std::uint64_t seed = 0;
    double beta = kDefaultPlateauBeta;
    int max_iterations = 12;
    int sampled_retries = 3;
};

/// Produces the exact outcome distribution of phase estimation at span alpha * dt.
using DistributionSource = std::function<OutcomeDistribution(std::uint64_t alpha)>;

RefinementTrace run_refinement(const DistributionSource& source, int n_ancilla, double delta_t,
                               const RefinementOptions& opts);

/// Runs phase estimation on the circuit simulator at each span. `cfg.alpha`
/// is ignored; the schedule starts at alpha = 1.
RefinementTrace run_refinement(const Propagator& prop, const CVector& eigenstate,
                               const QpeConfig& cfg, const RefinementOptions& opts);

}  // namespace iqpe
