#pragma once

#include "repsim/ops.hpp"
#include "repsim/states.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

// Exact density-matrix implementation of the states, channels, and circuits
// behind every closed form in ops/states. Correctness-only: dense complex
// matrices up to 16x16.
//
// Basis convention: qubit 0 is the most significant bit of the basis index,
// so |q0 q1 ... q_{n-1}> has index sum_k q_k * 2^(n-1-k), and kron(A, B)
// places A on the more significant qubits.
namespace repsim::oracle {

using Matrix = Eigen::MatrixXcd;
using Gate2q = Eigen::Matrix4cd;
using Gate1q = Eigen::Matrix2cd;
using Complex = std::complex<double>;

namespace detail {

inline int qubit_count(const Matrix& rho) {
    int n = 0;
    while ((Eigen::Index{1} << n) < rho.rows()) ++n;
    if ((Eigen::Index{1} << n) != rho.rows() || rho.rows() != rho.cols())
        throw std::invalid_argument("density matrix dimension is not a power of two");
    return n;
}

// Bitmask of the given qubit within an n-qubit basis index.
inline int qubit_mask(int qubit, int n) {
    if (qubit < 0 || qubit >= n) throw std::invalid_argument("qubit index out of range");
    return 1 << (n - 1 - qubit);
}

inline int bit_at(int index, int qubit, int n) {
    return (index >> (n - 1 - qubit)) & 1;
}

} // namespace detail

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// --- fixed gates -----------------------------------------------------------

inline Gate1q pauli_x() {
    Gate1q g;
    g << 0, 1, 1, 0;
    return g;
}

inline Gate1q pauli_z() {
    Gate1q g;
    g << 1, 0, 0, -1;
    return g;
}

inline Gate1q hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    Gate1q g;
    g << s, s, s, -s;
    return g;
}

// CNOT with the first sub-qubit as control, second as target.
inline Gate2q cnot() {
    Gate2q g = Gate2q::Zero();
    g(0, 0) = 1;
    g(1, 1) = 1;
    g(2, 3) = 1;
    g(3, 2) = 1;
    return g;
}

// --- Bell states ------------------------------------------------------------

// Bell basis labeled by a phase bit and a parity bit:
//   (0,0) = Phi+, (1,0) = Phi-, (0,1) = Psi+, (1,1) = Psi-.
inline Eigen::Vector4cd bell_vector(int phase_bit, int parity_bit) {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    if (parity_bit == 0) {
        v(0) = s;
        v(3) = phase_bit == 0 ? s : -s;
    } else {
        v(1) = s;
        v(2) = phase_bit == 0 ? s : -s;
    }
    return v;
}

inline Matrix bell_projector(int phase_bit, int parity_bit) {
    const Eigen::Vector4cd v = bell_vector(phase_bit, parity_bit);
    return v * v.adjoint();
}

inline Matrix bell_diagonal_density(const NoisyBellState& s) {
    if (!(s.fidelity >= 0.0 && s.fidelity <= 1.0))
        throw std::domain_error("fidelity must be in [0,1]");
    const double f = s.fidelity;
    if (s.family == StateFamily::Dephased)
        return f * bell_projector(0, 0) + (1.0 - f) * bell_projector(1, 0);
    const double e = (1.0 - f) / 3.0;
    return f * bell_projector(0, 0) +
           e * (bell_projector(1, 0) + bell_projector(0, 1) + bell_projector(1, 1));
}

inline double fidelity_to_phi_plus(const Matrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw std::invalid_argument("fidelity_to_phi_plus expects a two-qubit state");
    const Eigen::Vector4cd v = bell_vector(0, 0);
    return (v.adjoint() * rho * v)(0, 0).real();
}

// --- generic channel machinery ----------------------------------------------

// Trace out the listed qubits; the remaining qubits keep their relative order.
inline Matrix partial_trace(const Matrix& rho, const std::vector<int>& traced) {
    const int n = detail::qubit_count(rho);
    int traced_mask = 0;
    for (int q : traced) traced_mask |= detail::qubit_mask(q, n);
    const int n_keep = n - static_cast<int>(traced.size());
    // Compress the kept bits of a full index into a reduced index.
    const int dim = 1 << n;
    std::vector<int> compress(dim, 0);
    for (int idx = 0; idx < dim; ++idx) {
        int out = 0;
        for (int q = 0; q < n; ++q) {
            if (detail::qubit_mask(q, n) & traced_mask) continue;
            out = (out << 1) | detail::bit_at(idx, q, n);
        }
        compress[idx] = out;
    }
    Matrix out = Matrix::Zero(1 << n_keep, 1 << n_keep);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            if ((r & traced_mask) == (c & traced_mask)) out(compress[r], compress[c]) += rho(r, c);
    return out;
}

// Replace the listed qubits by the maximally mixed state:
// I_S / 2^|S| tensor tr_S(rho), with the qubits kept in their original slots.
inline Matrix replace_with_mixed(const Matrix& rho, const std::vector<int>& qubits) {
    const int n = detail::qubit_count(rho);
    int mask = 0;
    for (int q : qubits) mask |= detail::qubit_mask(q, n);
    const Matrix reduced = partial_trace(rho, qubits);
    const int dim = 1 << n;
    const int n_keep = n - static_cast<int>(qubits.size());
    std::vector<int> compress(dim, 0);
    for (int idx = 0; idx < dim; ++idx) {
        int out = 0;
        for (int q = 0; q < n; ++q) {
            if (detail::qubit_mask(q, n) & mask) continue;
            out = (out << 1) | detail::bit_at(idx, q, n);
        }
        compress[idx] = out;
    }
    const double norm = 1.0 / static_cast<double>(1 << qubits.size());
    Matrix out = Matrix::Zero(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            if ((r & mask) == (c & mask)) out(r, c) = norm * reduced(compress[r], compress[c]);
    (void)n_keep;
    return out;
}

// Lift a single-qubit operator to the full space.
inline Matrix embed_one_qubit(const Gate1q& op, int qubit, int n) {
    (void)detail::qubit_mask(qubit, n);
    Matrix out = Matrix::Ones(1, 1);
    const Matrix id = Matrix::Identity(2, 2);
    for (int q = 0; q < n; ++q) out = kron(out, q == qubit ? Matrix(op) : id);
    return out;
}

// Lift a two-qubit gate acting on (qa, qb) to the full space; qa maps to the
// gate's first sub-qubit, qb to the second. The qubits need not be adjacent.
inline Matrix embed_two_qubit(const Gate2q& gate, int qa, int qb, int n) {
    if (qa == qb) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    const int mask_a = detail::qubit_mask(qa, n);
    const int mask_b = detail::qubit_mask(qb, n);
    const int dim = 1 << n;
    Matrix out = Matrix::Zero(dim, dim);
    for (int c = 0; c < dim; ++c) {
        const int rest = c & ~(mask_a | mask_b);
        const int sub_c = (detail::bit_at(c, qa, n) << 1) | detail::bit_at(c, qb, n);
        for (int sub_r = 0; sub_r < 4; ++sub_r) {
            const int r = rest | ((sub_r >> 1) ? mask_a : 0) | ((sub_r & 1) ? mask_b : 0);
            out(r, c) = gate(sub_r, sub_c);
        }
    }
    return out;
}

// --- channels ----------------------------------------------------------------

// Single-qubit depolarizing channel with survival probability lambda:
// E[rho] = lambda*rho + (1-lambda) * (I_q/2 tensor tr_q rho).
inline Matrix apply_depolarizing(const Matrix& rho, int qubit, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::domain_error("lambda must be in [0,1]");
    return lambda * rho + (1.0 - lambda) * replace_with_mixed(rho, {qubit});
}

// Single-qubit dephasing channel: E[rho] = (1-q)*rho + q * Z rho Z.
inline Matrix apply_dephasing(const Matrix& rho, int qubit, double flip_prob) {
    if (!(flip_prob >= 0.0 && flip_prob <= 1.0))
        throw std::domain_error("flip probability must be in [0,1]");
    const int n = detail::qubit_count(rho);
    const Matrix z = embed_one_qubit(pauli_z(), qubit, n);
    return (1.0 - flip_prob) * rho + flip_prob * (z * rho * z.adjoint());
}

// Noisy two-qubit gate: p * U rho U^dag + (1-p)/4 * I_ij tensor tr_ij rho.
inline Matrix noisy_gate(const Matrix& rho, const Gate2q& gate, int qa, int qb, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("gate probability must be in [0,1]");
    const int n = detail::qubit_count(rho);
    const Matrix u = embed_two_qubit(gate, qa, qb, n);
    const Matrix ideal = u * rho * u.adjoint();
    if (p == 1.0) return ideal;
    return p * ideal + (1.0 - p) * replace_with_mixed(rho, {qa, qb});
}

// One reported outcome of a noisy single-qubit Z measurement. The measured
// qubit is traced out; post_state is normalized when probability > 0.
struct MeasurementBranch {
    double probability = 0.0;
    Matrix post_state;
};

// Noisy measurement POVM: outcome i is reported with probability
// tr[(eta*P_i + (1-eta)*P_{1-i}) rho]; the conditional remaining state mixes
// the true projections with the same weights, then discards the qubit.
inline std::array<MeasurementBranch, 2> noisy_measure(const Matrix& rho, int qubit, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("eta must be in [0,1]");
    const int n = detail::qubit_count(rho);
    const int mask = detail::qubit_mask(qubit, n);
    const int dim = 1 << n;
    std::array<Matrix, 2> projected = {Matrix::Zero(dim, dim), Matrix::Zero(dim, dim)};
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            if ((r & mask) == (c & mask)) projected[(r & mask) ? 1 : 0](r, c) = rho(r, c);
    std::array<MeasurementBranch, 2> branches;
    for (int report = 0; report < 2; ++report) {
        const Matrix mix = eta * projected[report] + (1.0 - eta) * projected[1 - report];
        Matrix reduced = partial_trace(mix, {qubit});
        const double prob = reduced.trace().real();
        if (prob > 0.0) reduced /= prob;
        branches[report] = {prob, std::move(reduced)};
    }
    return branches;
}

// --- circuits ----------------------------------------------------------------

// Entanglement swap at the middle station. Qubits: 0 = end A, 1 and 2 = the
// station's halves of the two links, 3 = end C. Bell-state measurement on
// (1,2) as noisy CNOT(1->2), noiseless Hadamard on 1, noisy Z measurements of
// 1 and 2; the reported outcomes select the Pauli correction X^{m2} Z^{m1} on
// qubit 3. Returns the fidelity to Phi+ of the corrected (0,3) state averaged
// over outcomes.
inline double oracle_swap(const NoisyBellState& s1, const NoisyBellState& s2,
                          const OperationNoise& noise) {
    repsim::detail::require_same_family(s1, s2, "oracle_swap");
    repsim::detail::require_perfect_for_dephased(s1, noise, "oracle_swap");
    validate(noise);
    Matrix rho = kron(bell_diagonal_density(s1), bell_diagonal_density(s2));
    rho = noisy_gate(rho, cnot(), 1, 2, noise.p_gate);
    const Matrix h = embed_one_qubit(hadamard(), 1, 4);
    rho = h * rho * h.adjoint();
    double fidelity = 0.0;
    const auto first = noisy_measure(rho, 1, noise.eta_meas);
    for (int m1 = 0; m1 < 2; ++m1) {
        if (first[m1].probability == 0.0) continue;
        // Remaining qubits (0, 2, 3) reindex to (0, 1, 2); original qubit 2 is index 1.
        const auto second = noisy_measure(first[m1].post_state, 1, noise.eta_meas);
        for (int m2 = 0; m2 < 2; ++m2) {
            if (second[m2].probability == 0.0) continue;
            const double prob = first[m1].probability * second[m2].probability;
            // Remaining qubits (0, 3) reindex to (0, 1); correct end C at index 1.
            Gate1q correction = Gate1q::Identity();
            if (m2 == 1) correction = pauli_x() * correction;
            if (m1 == 1) correction = pauli_z() * correction;
            const Matrix c = embed_one_qubit(correction, 1, 2);
            const Matrix corrected = c * second[m2].post_state * c.adjoint();
            fidelity += prob * fidelity_to_phi_plus(corrected);
        }
    }
    return fidelity;
}

struct PurifyEstimate {
    double success_prob = 0.0;
    double out_fidelity = 0.0;
};

// 2-to-1 recurrence purification of one link. Qubits: kept pair on (0, 1),
// sacrificed pair on (2, 3), with (0, 2) on one node and (1, 3) on the other.
// One noisy CNOT per node (kept as control), noisy Z measurements of 2 and 3;
// success means equal reported outcomes. Dephased inputs are first conjugated
// by local Hadamards, which maps the Phi- error onto Psi+ so the parity
// comparison can see it (the DEJMPS basis choice), and the kept pair is
// conjugated back on success. out_fidelity is the Phi+ overlap of the
// conditional kept state; twirling back to the input family preserves it.
inline PurifyEstimate oracle_purify(const NoisyBellState& kept, const NoisyBellState& sacrificed,
                                    const OperationNoise& noise) {
    repsim::detail::require_same_family(kept, sacrificed, "oracle_purify");
    repsim::detail::require_perfect_for_dephased(kept, noise, "oracle_purify");
    validate(noise);
    const bool dephased = kept.family == StateFamily::Dephased;
    Matrix rho = kron(bell_diagonal_density(kept), bell_diagonal_density(sacrificed));
    if (dephased) {
        Matrix h_all = Matrix::Ones(1, 1);
        for (int q = 0; q < 4; ++q) h_all = kron(h_all, Matrix(hadamard()));
        rho = h_all * rho * h_all.adjoint();
    }
    rho = noisy_gate(rho, cnot(), 0, 2, noise.p_gate);
    rho = noisy_gate(rho, cnot(), 1, 3, noise.p_gate);
    double success_prob = 0.0;
    Matrix conditional = Matrix::Zero(4, 4);
    const auto first = noisy_measure(rho, 2, noise.eta_meas);
    for (int m2 = 0; m2 < 2; ++m2) {
        if (first[m2].probability == 0.0) continue;
        // Remaining qubits (0, 1, 3) reindex to (0, 1, 2); original qubit 3 is index 2.
        const auto second = noisy_measure(first[m2].post_state, 2, noise.eta_meas);
        const int m3 = m2; // success branch only
        if (second[m3].probability == 0.0) continue;
        const double prob = first[m2].probability * second[m3].probability;
        success_prob += prob;
        conditional += prob * second[m3].post_state;
    }
    if (success_prob == 0.0) return {0.0, 0.0};
    conditional /= success_prob;
    if (dephased) {
        Matrix h_pair = kron(Matrix(hadamard()), Matrix(hadamard()));
        conditional = h_pair * conditional * h_pair.adjoint();
    }
    return {success_prob, fidelity_to_phi_plus(conditional)};
}

// --- validity checks (used by tests and the verification report) -------------

inline double hermiticity_error(const Matrix& rho) {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

inline double trace_error(const Matrix& rho) { return std::abs(rho.trace().real() - 1.0); }

inline double min_eigenvalue(const Matrix& rho) {
    const Matrix sym = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    return solver.eigenvalues().minCoeff();
}

} // namespace repsim::oracle
