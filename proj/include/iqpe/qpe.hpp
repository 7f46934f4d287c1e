#pragma once

// Phase estimation with propagators: the two-register circuit, its closed-form
// outcome distribution, finite-shot sampling and peak/plateau detection.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "iqpe/model.hpp"
#include "iqpe/numkernel.hpp"

namespace iqpe {

inline constexpr int kMaxAncilla = 12;
/// Largest joint (ancilla x system) state the circuit simulator will build.
inline constexpr std::size_t kMaxCircuitDim = std::size_t{1} << 22;

struct QpeConfig {
    int n_ancilla = 3;
    double delta_t = 1.0;
    double alpha = 1.0;  // the circuit evolves for alpha * delta_t per unit of ancilla value

    std::size_t slots() const noexcept { return std::size_t{1} << n_ancilla; }
    /// Throws iqpe::Error unless 1 <= n_ancilla <= 12, delta_t > 0 and alpha >= 1.
    void validate() const;
};

/// Dimensionless eigenphase E * alpha * dt / (2 pi), reduced to [0, 1).
double eigenphase(double energy, const QpeConfig& cfg);

class OutcomeDistribution {
public:
    /// Throws unless probs has 2^n_ancilla entries in [0, 1] summing to 1.
    OutcomeDistribution(int n_ancilla, std::vector<double> probs);

    int n_ancilla() const noexcept { return n_ancilla_; }
    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t x) const { return probs_[x]; }
    std::span<const double> probs() const noexcept { return probs_; }

private:
    int n_ancilla_;
    std::vector<double> probs_;
};

double max_abs_diff(const OutcomeDistribution& a, const OutcomeDistribution& b);

/// Applies |n> -> 2^{-N/2} sum_x exp(+2 pi i n x / 2^N) |x> to the ancilla
/// register of a state laid out as index = x * block + s, using Hadamard,
/// controlled-phase and swap gates.
void fourier_transform_register(std::span<Complex> state, int n_ancilla, std::size_t block);

/// Stage-by-stage statevector simulation: Hadamards on the ancillas,
/// controlled U(2^j alpha dt) from ancilla j, then the ancilla Fourier
/// transform. Returns the marginal distribution of the ancilla register.
OutcomeDistribution simulate_circuit(const Propagator& prop, const CVector& eigenstate,
                                     const QpeConfig& cfg);

/// Closed form Pr(x) = |2^{-N} sum_n exp(i n (2 pi x / 2^N - 2 pi phase))|^2.
/// Exact integer phases return the one-hot limit.
OutcomeDistribution analytic_distribution_for_phase(double phase, int n_ancilla);
OutcomeDistribution analytic_distribution(double energy, const QpeConfig& cfg);

/// Multinomial counts of `shots` draws, by inverse-CDF lookup on a
/// mt19937_64 stream seeded with `seed`.
std::vector<std::uint64_t> sample_counts(const OutcomeDistribution& dist, std::uint64_t shots,
                                         std::uint64_t seed);
/// Empirical frequencies counts / shots.
OutcomeDistribution sample_distribution(const OutcomeDistribution& dist, std::uint64_t shots,
                                        std::uint64_t seed);

inline constexpr double kDefaultPlateauBeta = 0.8;

struct PeakReport {
    std::size_t y = 0;               // argmax, ties to the smaller slot
    std::size_t plateau_start = 0;   // first slot of the plateau going upward mod 2^N
    std::size_t c_slots = 1;         // plateau size C
    std::size_t n_slots = 1;         // 2^N

    bool contains(std::size_t x) const noexcept {
        return (x + n_slots - plateau_start) % n_slots < c_slots;
    }
    std::vector<std::size_t> plateau() const;
};

/// Plateau = maximal cyclic run around the argmax with Pr(x) >= beta * Pr(y).
PeakReport detect_peak_plateau(const OutcomeDistribution& dist, double beta = kDefaultPlateauBeta);

/// CSV with header `x,prob` and probabilities at 17 significant digits.
void write_distribution_csv(std::ostream& os, const OutcomeDistribution& dist);
OutcomeDistribution read_distribution_csv(std::istream& is);

}  // namespace iqpe
