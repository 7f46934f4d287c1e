#include "iqpe/qpe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace iqpe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sin(pi x), exactly zero at integers.
double sin_pi(double x) {
    const double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
    if (r == 0.0 || std::abs(r) == 1.0) return 0.0;
    return std::sin(std::numbers::pi * r);
}

double frac(double x) {
    double f = x - std::floor(x);
    return f >= 1.0 ? 0.0 : f;
}

}  // namespace

void QpeConfig::validate() const {
    if (n_ancilla < 1 || n_ancilla > kMaxAncilla) {
        throw Error("n_ancilla must be in [1, " + std::to_string(kMaxAncilla) + "], got " + std::to_string(n_ancilla));
    }
    if (!(delta_t > 0.0) || !std::isfinite(delta_t)) throw Error("delta_t must be a positive finite number");
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw Error("alpha must be finite and >= 1");
}

double eigenphase(double energy, const QpeConfig& cfg) {
    const double turns = energy * cfg.alpha * cfg.delta_t / kTwoPi;
    if (!std::isfinite(turns)) throw Error("eigenphase: energy * alpha * delta_t overflows");
    return frac(turns);
}

OutcomeDistribution::OutcomeDistribution(int n_ancilla, std::vector<double> probs)
    : n_ancilla_(n_ancilla), probs_(std::move(probs)) {
    if (n_ancilla_ < 1 || n_ancilla_ > kMaxAncilla) throw Error("OutcomeDistribution: n_ancilla out of range");
    if (probs_.size() != (std::size_t{1} << n_ancilla_)) {
        throw DimensionError("OutcomeDistribution: expected 2^n_ancilla probabilities");
    }
    double total = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error("OutcomeDistribution: probability outside [0, 1]");
        total += p;
    }
    // Construction-time guard only; the 1e-12 normalization property is
    // asserted by the tests for every producer.
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream os;
        os.precision(17);
        os << "OutcomeDistribution: probabilities sum to " << total;
        throw Error(os.str());
    }
}

double max_abs_diff(const OutcomeDistribution& a, const OutcomeDistribution& b) {
    if (a.size() != b.size()) throw DimensionError("max_abs_diff: distributions differ in size");
    double best = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) best = std::max(best, std::abs(a[x] - b[x]));
    return best;
}

void fourier_transform_register(std::span<Complex> state, int n_ancilla, std::size_t block) {
    const std::size_t slots = std::size_t{1} << n_ancilla;
    if (state.size() != slots * block) throw DimensionError("fourier_transform_register: state size mismatch");
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

    auto hadamard = [&](int q) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t x = 0; x < slots; ++x) {
            if (x & bit) continue;
            Complex* lo = &state[x * block];
            Complex* hi = &state[(x | bit) * block];
            for (std::size_t s = 0; s < block; ++s) {
                const Complex a = lo[s];
                const Complex b = hi[s];
                lo[s] = inv_sqrt2 * (a + b);
                hi[s] = inv_sqrt2 * (a - b);
            }
        }
    };
    auto controlled_phase = [&](int q1, int q2, double angle) {
        const std::size_t mask = (std::size_t{1} << q1) | (std::size_t{1} << q2);
        const Complex ph = std::polar(1.0, angle);
        for (std::size_t x = 0; x < slots; ++x) {
            if ((x & mask) != mask) continue;
            Complex* blk = &state[x * block];
            for (std::size_t s = 0; s < block; ++s) blk[s] *= ph;
        }
    };

    // Most significant ancilla first, then reverse the qubit order.
    for (int q = n_ancilla - 1; q >= 0; --q) {
        hadamard(q);
        for (int p = q - 1; p >= 0; --p) {
            controlled_phase(q, p, std::numbers::pi / static_cast<double>(std::size_t{1} << (q - p)));
        }
    }
    for (int q = 0; q < n_ancilla / 2; ++q) {
        const int r = n_ancilla - 1 - q;
        const std::size_t bq = std::size_t{1} << q;
        const std::size_t br = std::size_t{1} << r;
        for (std::size_t x = 0; x < slots; ++x) {
            if ((x & bq) && !(x & br)) {
                const std::size_t y = (x & ~bq) | br;
                std::swap_ranges(state.begin() + static_cast<std::ptrdiff_t>(x * block),
                                 state.begin() + static_cast<std::ptrdiff_t>((x + 1) * block),
                                 state.begin() + static_cast<std::ptrdiff_t>(y * block));
            }
        }
    }
}

OutcomeDistribution simulate_circuit(const Propagator& prop, const CVector& eigenstate,
                                     const QpeConfig& cfg) {
    cfg.validate();
    const std::size_t block = prop.dim();
    if (eigenstate.dim() != block) throw DimensionError("simulate_circuit: eigenstate dimension does not match propagator");
    if (!eigenstate.is_normalized(1e-12)) throw Error("simulate_circuit: eigenstate is not normalized");
    const std::size_t slots = cfg.slots();
    if (slots * block > kMaxCircuitDim) throw DimensionError("simulate_circuit: joint state exceeds dimension cap");

    // |Phi_I> = |0>^N (x) |psi>
    std::vector<Complex> state(slots * block);
    std::copy(eigenstate.amplitudes().begin(), eigenstate.amplitudes().end(), state.begin());

    // |Phi_II>: Hadamard on every ancilla
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (int q = 0; q < cfg.n_ancilla; ++q) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t x = 0; x < slots; ++x) {
            if (x & bit) continue;
            for (std::size_t s = 0; s < block; ++s) {
                const Complex a = state[x * block + s];
                const Complex b = state[(x | bit) * block + s];
                state[x * block + s] = inv_sqrt2 * (a + b);
                state[(x | bit) * block + s] = inv_sqrt2 * (a - b);
            }
        }
    }

    // |Phi_III>: ancilla q controls U(2^q alpha dt); ancilla value n accumulates U(n alpha dt)
    std::vector<Complex> scratch(block);
    for (int q = 0; q < cfg.n_ancilla; ++q) {
        const double tau = std::ldexp(cfg.alpha * cfg.delta_t, q);
        const CMatrix u = prop.evolve(tau);
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t x = 0; x < slots; ++x) {
            if (!(x & bit)) continue;
            Complex* blk = &state[x * block];
            for (std::size_t i = 0; i < block; ++i) {
                Complex acc = 0.0;
                for (std::size_t j = 0; j < block; ++j) acc += u(i, j) * blk[j];
                scratch[i] = acc;
            }
            std::copy(scratch.begin(), scratch.end(), blk);
        }
    }

    // |Phi_IV>
    fourier_transform_register(state, cfg.n_ancilla, block);

    std::vector<double> probs(slots, 0.0);
    for (std::size_t x = 0; x < slots; ++x) {
        double p = 0.0;
        for (std::size_t s = 0; s < block; ++s) p += std::norm(state[x * block + s]);
        probs[x] = std::min(p, 1.0);
    }
    return OutcomeDistribution(cfg.n_ancilla, std::move(probs));
}

OutcomeDistribution analytic_distribution_for_phase(double phase, int n_ancilla) {
    if (n_ancilla < 1 || n_ancilla > kMaxAncilla) throw Error("analytic_distribution: n_ancilla out of range");
    if (!std::isfinite(phase)) throw Error("analytic_distribution: phase is not finite");
    const std::size_t slots = std::size_t{1} << n_ancilla;
    const double m = static_cast<double>(slots);
    const double scaled = m * frac(phase);  // 2^N * phase, in [0, 2^N)

    std::vector<double> probs(slots);
    for (std::size_t x = 0; x < slots; ++x) {
        // Denominator phase 2 pi (x - 2^N phase) / 2^N, reduced to [-pi, pi).
        const double delta = static_cast<double>(x) - scaled;
        double wrapped = delta / m;
        wrapped -= std::round(wrapped);
        if (std::abs(kTwoPi * wrapped) < 1e-12) {
            probs[x] = 1.0;
            continue;
        }
        // |1 - e^{i M theta}| / |M (1 - e^{i theta})| = |sin(M theta / 2)| / (M |sin(theta / 2)|)
        const double num = sin_pi(delta);
        const double den = m * sin_pi(wrapped);
        probs[x] = std::min((num * num) / (den * den), 1.0);
    }
    return OutcomeDistribution(n_ancilla, std::move(probs));
}

OutcomeDistribution analytic_distribution(double energy, const QpeConfig& cfg) {
    cfg.validate();
    return analytic_distribution_for_phase(eigenphase(energy, cfg), cfg.n_ancilla);
}

std::vector<std::uint64_t> sample_counts(const OutcomeDistribution& dist, std::uint64_t shots,
                                         std::uint64_t seed) {
    if (shots == 0) throw Error("sample_distribution: shots must be >= 1");
    std::vector<double> cumulative(dist.size());
    double running = 0.0;
    for (std::size_t x = 0; x < dist.size(); ++x) {
        running += dist[x];
        cumulative[x] = running;
    }
    const double total = cumulative.back();

    // 53-bit uniforms built from raw engine output, so the stream is identical
    // across standard library implementations.
    std::mt19937_64 engine(seed);
    std::vector<std::uint64_t> counts(dist.size(), 0);
    for (std::uint64_t k = 0; k < shots; ++k) {
        const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53 * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        ++counts[static_cast<std::size_t>(it - cumulative.begin())];
    }
    return counts;
}

OutcomeDistribution sample_distribution(const OutcomeDistribution& dist, std::uint64_t shots,
                                        std::uint64_t seed) {
    const auto counts = sample_counts(dist, shots, seed);
    std::vector<double> freq(counts.size());
    for (std::size_t x = 0; x < counts.size(); ++x) {
        freq[x] = static_cast<double>(counts[x]) / static_cast<double>(shots);
    }
    return OutcomeDistribution(dist.n_ancilla(), std::move(freq));
}

std::vector<std::size_t> PeakReport::plateau() const {
    std::vector<std::size_t> out(c_slots);
    for (std::size_t k = 0; k < c_slots; ++k) out[k] = (plateau_start + k) % n_slots;
    return out;
}

PeakReport detect_peak_plateau(const OutcomeDistribution& dist, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw Error("detect_peak_plateau: beta must be in (0, 1]");
    const std::size_t n = dist.size();
    const auto probs = dist.probs();
    const std::size_t y = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    const double threshold = beta * probs[y];

    std::size_t below = 0;  // run length going down from y
    while (below + 1 < n && probs[(y + n - below - 1) % n] >= threshold) ++below;
    std::size_t above = 0;
    while (below + above + 1 < n && probs[(y + above + 1) % n] >= threshold) ++above;

    PeakReport r;
    r.y = y;
    r.n_slots = n;
    r.plateau_start = (y + n - below) % n;
    r.c_slots = below + above + 1;
    return r;
}

void write_distribution_csv(std::ostream& os, const OutcomeDistribution& dist) {
    const auto old_precision = os.precision(17);
    os << "x,prob\n";
    for (std::size_t x = 0; x < dist.size(); ++x) os << x << ',' << dist[x] << '\n';
    os.precision(old_precision);
}

OutcomeDistribution read_distribution_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "x,prob") throw Error("distribution csv: missing 'x,prob' header");
    std::vector<double> probs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error("distribution csv: malformed row '" + line + "'");
        const std::size_t x = std::stoull(line.substr(0, comma));
        if (x != probs.size()) throw Error("distribution csv: rows must list x = 0, 1, 2, ... in order");
        probs.push_back(std::stod(line.substr(comma + 1)));
    }
    const auto n = static_cast<int>(std::bit_width(probs.size())) - 1;
    if (probs.empty() || (std::size_t{1} << n) != probs.size()) {
        throw Error("distribution csv: row count is not a power of two");
    }
    return OutcomeDistribution(n, std::move(probs));
}

}  // namespace iqpe
