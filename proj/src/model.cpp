#include "iqpe/model.hpp"

#include <cmath>
#include <bit>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace iqpe {

namespace {

bool valid_letter(char c) { return c == 'I' || c == 'X' || c == 'Y' || c == 'Z'; }

// Bit masks of a Pauli string: X or Y flip the bit, Y or Z pick up a sign.
struct PauliMasks {
    std::uint64_t flip = 0;
    std::uint64_t sign = 0;
    int n_y = 0;
};

PauliMasks masks_of(std::string_view paulis) {
    PauliMasks m;
    for (std::size_t q = 0; q < paulis.size(); ++q) {
        const std::uint64_t bit = std::uint64_t{1} << q;
        switch (paulis[q]) {
            case 'X': m.flip |= bit; break;
            case 'Y': m.flip |= bit; m.sign |= bit; ++m.n_y; break;
            case 'Z': m.sign |= bit; break;
            default: break;
        }
    }
    return m;
}

// P|b> = i^{n_y} (-1)^{popcount(b & sign)} |b ^ flip>
Complex pauli_phase(const PauliMasks& m, std::uint64_t b) {
    static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    Complex p = kIPow[m.n_y % 4];
    if (std::popcount(b & m.sign) & 1) p = -p;
    return p;
}

std::size_t checked_dim(std::size_t n_qubits, std::size_t max_dim) {
    if (n_qubits >= 63 || (std::size_t{1} << n_qubits) > max_dim) {
        std::ostringstream os;
        os << n_qubits << "-qubit operator exceeds dimension cap " << max_dim;
        throw DimensionError(os.str());
    }
    return std::size_t{1} << n_qubits;
}

}  // namespace

PauliSum::PauliSum(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits == 0) throw Error("PauliSum: n_qubits must be positive");
}

PauliSum::PauliSum(std::size_t n_qubits, std::vector<PauliTerm> terms) : PauliSum(n_qubits) {
    for (auto& t : terms) add(t.coefficient, t.paulis);
}

void PauliSum::add(double coefficient, std::string_view paulis) {
    if (paulis.size() != n_qubits_) {
        std::ostringstream os;
        os << "Pauli string '" << paulis << "' has length " << paulis.size() << ", expected " << n_qubits_;
        throw Error(os.str());
    }
    for (char c : paulis) {
        if (!valid_letter(c)) throw Error("Pauli string '" + std::string(paulis) + "' contains a letter outside IXYZ");
    }
    if (!std::isfinite(coefficient)) throw Error("Pauli coefficient is not finite");
    terms_.push_back({coefficient, std::string(paulis)});
}

PauliSum PauliSum::simplified() const {
    std::vector<PauliTerm> merged;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& t : terms_) {
        auto [it, inserted] = index.try_emplace(t.paulis, merged.size());
        if (inserted) {
            merged.push_back(t);
        } else {
            merged[it->second].coefficient += t.coefficient;
        }
    }
    PauliSum out(n_qubits_);
    for (const auto& t : merged)
        if (t.coefficient != 0.0) out.terms_.push_back(t);
    return out;
}

void write_pauli_sum(std::ostream& os, const PauliSum& h) {
    os << "# n_qubits " << h.n_qubits() << '\n';
    const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& t : h.terms()) os << t.coefficient << ' ' << t.paulis << '\n';
    os.precision(old_precision);
}

PauliSum read_pauli_sum(std::istream& is) {
    std::size_t n_qubits = 0;
    std::vector<PauliTerm> terms;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first.front() == '#') {
            std::string key;
            std::size_t value = 0;
            if (first == "#" && (ls >> key) && key == "n_qubits" && (ls >> value)) n_qubits = value;
            continue;
        }
        PauliTerm term;
        std::size_t consumed = 0;
        try {
            term.coefficient = std::stod(first, &consumed);
        } catch (const std::exception&) {
            consumed = 0;
        }
        if (consumed != first.size() || !(ls >> term.paulis)) {
            throw Error("pauli sum line " + std::to_string(line_no) + ": expected 'coefficient PAULISTRING'");
        }
        std::string extra;
        if (ls >> extra) throw Error("pauli sum line " + std::to_string(line_no) + ": trailing text");
        terms.push_back(std::move(term));
    }
    if (n_qubits == 0) {
        if (terms.empty()) throw Error("pauli sum: no terms and no '# n_qubits' header");
        n_qubits = terms.front().paulis.size();
    }
    return PauliSum(n_qubits, std::move(terms));
}

namespace {

std::string string_with(std::size_t n, std::initializer_list<std::pair<std::size_t, char>> letters) {
    std::string s(n, 'I');
    for (auto [q, c] : letters) s[q] = c;
    return s;
}

// c_a^dag c_b + c_b^dag c_a = (X_a Z..Z X_b + Y_a Z..Z Y_b) / 2 for a < b.
void add_hopping(PauliSum& h, double amplitude, std::size_t a, std::size_t b) {
    std::string xx = string_with(h.n_qubits(), {{a, 'X'}, {b, 'X'}});
    std::string yy = string_with(h.n_qubits(), {{a, 'Y'}, {b, 'Y'}});
    for (std::size_t q = a + 1; q < b; ++q) xx[q] = yy[q] = 'Z';
    h.add(0.5 * amplitude, xx);
    h.add(0.5 * amplitude, yy);
}

// n_a n_b = (I - Z_a - Z_b + Z_a Z_b) / 4.
void add_density_density(PauliSum& h, double amplitude, std::size_t a, std::size_t b) {
    const std::size_t n = h.n_qubits();
    h.add(0.25 * amplitude, std::string(n, 'I'));
    h.add(-0.25 * amplitude, string_with(n, {{a, 'Z'}}));
    h.add(-0.25 * amplitude, string_with(n, {{b, 'Z'}}));
    h.add(0.25 * amplitude, string_with(n, {{a, 'Z'}, {b, 'Z'}}));
}

constexpr std::size_t kSite1Up = 0;
constexpr std::size_t kSite1Down = 1;
constexpr std::size_t kSite2Up = 2;
constexpr std::size_t kSite2Down = 3;

}  // namespace

PauliSum build_hubbard(const HubbardParams& params) {
    if (!std::isfinite(params.t) || !std::isfinite(params.u)) throw Error("Hubbard parameters must be finite");
    PauliSum h(4);
    add_hopping(h, -params.t, kSite1Up, kSite2Up);
    add_hopping(h, -params.t, kSite1Down, kSite2Down);
    add_density_density(h, params.u, kSite1Up, kSite1Down);
    add_density_density(h, params.u, kSite2Up, kSite2Down);
    return h.simplified();
}

PauliSum number_operator(std::size_t n_qubits) {
    PauliSum n(n_qubits);
    n.add(0.5 * static_cast<double>(n_qubits), std::string(n_qubits, 'I'));
    for (std::size_t q = 0; q < n_qubits; ++q) n.add(-0.5, string_with(n_qubits, {{q, 'Z'}}));
    return n;
}

PauliSum hubbard_sz_operator() {
    // (n_up - n_down)/2 with n = (I - Z)/2 leaves (Z_down - Z_up)/4 per site.
    PauliSum sz(4);
    sz.add(-0.25, string_with(4, {{kSite1Up, 'Z'}}));
    sz.add(0.25, string_with(4, {{kSite1Down, 'Z'}}));
    sz.add(-0.25, string_with(4, {{kSite2Up, 'Z'}}));
    sz.add(0.25, string_with(4, {{kSite2Down, 'Z'}}));
    return sz;
}

PauliSum single_level(double energy) {
    PauliSum h(1);
    h.add(0.5 * energy, "I");
    h.add(-0.5 * energy, "Z");
    return h;
}

CMatrix pauli_sum_to_matrix(const PauliSum& h, std::size_t max_dim) {
    const std::size_t dim = checked_dim(h.n_qubits(), max_dim);
    CMatrix m(dim, dim);
    for (const auto& term : h.terms()) {
        const PauliMasks masks = masks_of(term.paulis);
        for (std::uint64_t col = 0; col < dim; ++col) {
            m(col ^ masks.flip, col) += term.coefficient * pauli_phase(masks, col);
        }
    }
    return m;
}

Propagator::Propagator(EigenDecomposition decomp, std::size_t n_qubits)
    : decomp_(std::move(decomp)), n_qubits_(n_qubits) {
    if (n_qubits_ == 0 || n_qubits_ >= 63 || decomp_.dim() != (std::size_t{1} << n_qubits_)) {
        throw DimensionError("Propagator: decomposition dimension does not match 2^n_qubits");
    }
    if (decomp_.eigenvectors.rows() != decomp_.dim() || decomp_.eigenvectors.cols() != decomp_.dim()) {
        throw DimensionError("Propagator: eigenvector matrix shape mismatch");
    }
}

CVector Propagator::eigenstate(std::size_t j) const {
    if (j >= dim()) throw DimensionError("Propagator: eigenstate index out of range");
    return decomp_.eigenvector(j);
}

CMatrix Propagator::evolve(double tau) const { return unitary_exp(decomp_, tau, -1); }

CVector Propagator::apply(double tau, const CVector& v) const {
    if (v.dim() != dim()) throw DimensionError("Propagator::apply: dimension mismatch");
    const CMatrix& vecs = decomp_.eigenvectors;
    CVector out(dim());
    for (std::size_t k = 0; k < dim(); ++k) {
        Complex overlap = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) overlap += std::conj(vecs(i, k)) * v[i];
        overlap *= std::polar(1.0, -decomp_.eigenvalues[k] * tau);
        for (std::size_t i = 0; i < dim(); ++i) out[i] += vecs(i, k) * overlap;
    }
    return out;
}

Propagator exact_propagator(const PauliSum& h, std::size_t max_dim) {
    return Propagator(hermitian_eigendecompose(pauli_sum_to_matrix(h, max_dim), max_dim), h.n_qubits());
}

CMatrix trotter_propagator(const PauliSum& h, double tau, int steps, std::size_t max_dim) {
    if (steps < 1) throw Error("trotter_propagator: steps must be >= 1");
    if (!std::isfinite(tau)) throw Error("trotter_propagator: tau is not finite");
    const std::size_t dim = checked_dim(h.n_qubits(), max_dim);
    const double dt = tau / steps;

    // One step as a matrix: left-multiply by exp(-i c P dt) = cos(c dt) I - i sin(c dt) P
    // for each term in order.
    CMatrix step = CMatrix::identity(dim);
    CMatrix scratch(dim, dim);
    for (const auto& term : h.terms()) {
        const PauliMasks masks = masks_of(term.paulis);
        const double c = std::cos(term.coefficient * dt);
        const Complex s = Complex(0.0, -std::sin(term.coefficient * dt));
        for (std::uint64_t b = 0; b < dim; ++b) {
            const std::uint64_t target = b ^ masks.flip;
            const Complex ph = s * pauli_phase(masks, b);
            for (std::size_t j = 0; j < dim; ++j) scratch(target, j) = c * step(target, j) + ph * step(b, j);
        }
        std::swap(step, scratch);
    }

    CMatrix u = CMatrix::identity(dim);
    for (int k = 0; k < steps; ++k) u = step * u;
    return u;
}

}  // namespace iqpe
