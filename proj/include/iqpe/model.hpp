#pragma once

// Hamiltonians as weighted Pauli strings, the two-site Hubbard model, and the
// propagators U(tau) = exp(-i H tau) they generate (hbar = 1).

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "iqpe/numkernel.hpp"

namespace iqpe {

/// A single weighted Pauli string. Character k of `paulis` acts on qubit k,
/// and qubit 0 is the least significant bit of a basis index.
struct PauliTerm {
    double coefficient = 0.0;
    std::string paulis;

    bool operator==(const PauliTerm&) const = default;
};

class PauliSum {
public:
    explicit PauliSum(std::size_t n_qubits);
    PauliSum(std::size_t n_qubits, std::vector<PauliTerm> terms);

    /// Appends a term; throws if the string length or letters are invalid or
    /// the coefficient is not finite.
    void add(double coefficient, std::string_view paulis);

    /// Merges identical strings (first-appearance order) and drops terms whose
    /// coefficient became exactly zero.
    PauliSum simplified() const;

    std::size_t n_qubits() const noexcept { return n_qubits_; }
    const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    bool operator==(const PauliSum&) const = default;

private:
    std::size_t n_qubits_;
    std::vector<PauliTerm> terms_;
};

/// Line format: `coefficient PAULISTRING`, preceded by a `# n_qubits <n>`
/// header so that empty sums round-trip. Coefficients use 17 significant
/// digits. Other `#` lines and blank lines are ignored on read.
void write_pauli_sum(std::ostream& os, const PauliSum& h);
PauliSum read_pauli_sum(std::istream& is);

struct HubbardParams {
    double t = 1.0;  // transfer integral
    double u = 1.0;  // on-site interaction
};

/// Two-site Fermi-Hubbard Hamiltonian under Jordan-Wigner with mode order
/// (1 up, 1 down, 2 up, 2 down) on qubits 0..3.
PauliSum build_hubbard(const HubbardParams& params);

/// Total particle number sum_k (I - Z_k) / 2.
PauliSum number_operator(std::size_t n_qubits);
/// Total S_z for the Hubbard mode order: (n_up - n_down) / 2.
PauliSum hubbard_sz_operator();

/// One-qubit Hamiltonian (E/2)(I - Z): |0> has energy 0, |1> has energy E.
PauliSum single_level(double energy);

CMatrix pauli_sum_to_matrix(const PauliSum& h, std::size_t max_dim = kDefaultMaxDim);

/// Exact propagator backed by a full eigendecomposition. Any time span is a
/// single diagonal re-exponentiation, so U(alpha * dt) costs the same as U(dt).
class Propagator {
public:
    Propagator(EigenDecomposition decomp, std::size_t n_qubits);

    const EigenDecomposition& decomposition() const noexcept { return decomp_; }
    std::size_t n_qubits() const noexcept { return n_qubits_; }
    std::size_t dim() const noexcept { return decomp_.dim(); }

    double energy(std::size_t j) const { return decomp_.eigenvalues.at(j); }
    CVector eigenstate(std::size_t j) const;

    /// exp(-i H tau).
    CMatrix evolve(double tau) const;
    /// exp(-i H tau) |v> without forming the full matrix.
    CVector apply(double tau, const CVector& v) const;

private:
    EigenDecomposition decomp_;
    std::size_t n_qubits_;
};

Propagator exact_propagator(const PauliSum& h, std::size_t max_dim = kDefaultMaxDim);

/// First-order product formula (prod_k exp(-i c_k P_k tau / steps))^steps,
/// term 0 applied first within each step.
CMatrix trotter_propagator(const PauliSum& h, double tau, int steps,
                           std::size_t max_dim = kDefaultMaxDim);

}  // namespace iqpe
