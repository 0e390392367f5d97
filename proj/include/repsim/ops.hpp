#pragma once

#include "repsim/states.hpp"

#include <cmath>
#include <stdexcept>

namespace repsim {

// Two-qubit gate depolarizing parameter p_gate and single-qubit measurement
// correctness eta_meas. (1, 1) is perfect operation.
struct OperationNoise {
    double p_gate = 1.0;
    double eta_meas = 1.0;

    bool is_perfect() const { return p_gate == 1.0 && eta_meas == 1.0; }
};

inline void validate(const OperationNoise& n) {
    if (!(n.p_gate >= 0.0 && n.p_gate <= 1.0))
        throw std::domain_error("p_gate must be in [0,1]");
    if (!(n.eta_meas >= 0.0 && n.eta_meas <= 1.0))
        throw std::domain_error("eta_meas must be in [0,1]");
}

// Elementary-link entanglement generation parameters. The swap success
// probability p_swap rides along because it is drawn by the same protocol
// layer that draws generation attempts.
struct GenerationParams {
    double L0_km = 20.0;    // elementary link length
    double L_att_km = 20.0; // fiber attenuation length
    double eta_h = 0.1;     // combined hardware efficiency
    double F0 = 1.0;        // raw fidelity of a fresh pair
    double p_swap = 0.5;    // swapping success probability
};

inline void validate(const GenerationParams& g) {
    if (!(g.L0_km > 0.0)) throw std::domain_error("L0_km must be > 0");
    if (!(g.L_att_km > 0.0)) throw std::domain_error("L_att_km must be > 0");
    if (!(g.eta_h >= 0.0 && g.eta_h <= 1.0)) throw std::domain_error("eta_h must be in [0,1]");
    if (!(g.F0 >= 0.0 && g.F0 <= 1.0)) throw std::domain_error("F0 must be in [0,1]");
    if (!(g.p_swap >= 0.0 && g.p_swap <= 1.0)) throw std::domain_error("p_swap must be in [0,1]");
}

// Success probability of one heralded generation attempt over one elementary
// link, with the interference station at the midpoint:
//   p_g = exp(-L0/L_att) * eta_h
inline double gen_success_prob(const GenerationParams& g) {
    validate(g);
    return std::exp(-g.L0_km / g.L_att_km) * g.eta_h;
}

namespace detail {

inline void require_same_family(const NoisyBellState& a, const NoisyBellState& b,
                                const char* what) {
    if (a.family != b.family)
        throw std::invalid_argument(std::string(what) + " requires both pairs in the same family");
}

inline void require_perfect_for_dephased(const NoisyBellState& s, const OperationNoise& n,
                                         const char* what) {
    if (s.family == StateFamily::Dephased && !n.is_perfect())
        throw std::invalid_argument(std::string(what) +
                                    ": no imperfect-operation model for the dephased family");
}

} // namespace detail

// Fidelity of the long link produced by a successful entanglement swap at the
// middle station. Returns the state conditioned on success; the p_swap
// Bernoulli draw belongs to the protocol layer.
//
// Perfect dephased:  F' = F1*F2 + (1-F1)*(1-F2)
// Werner, with e_i = (1-F_i)/3, one noisy CNOT and two noisy measurements:
//   F' = (1-p)/4 + p*[eta^2*(F1*F2 + 3*e1*e2)
//                     + (1-eta^2)*(F1*e2 + e1*F2 + 2*e1*e2)]
// which at p = eta = 1 is the perfect Werner rule F1*F2 + (1-F1)*(1-F2)/3.
inline NoisyBellState swap_states(const NoisyBellState& s1, const NoisyBellState& s2,
                                  const OperationNoise& noise) {
    detail::require_same_family(s1, s2, "swap");
    detail::require_perfect_for_dephased(s1, noise, "swap");
    const double f1 = s1.fidelity;
    const double f2 = s2.fidelity;
    if (s1.family == StateFamily::Dephased)
        return {s1.family, f1 * f2 + (1.0 - f1) * (1.0 - f2)};
    const double e1 = (1.0 - f1) / 3.0;
    const double e2 = (1.0 - f2) / 3.0;
    const double p = noise.p_gate;
    const double eta2 = noise.eta_meas * noise.eta_meas;
    const double f = (1.0 - p) / 4.0 +
                     p * (eta2 * (f1 * f2 + 3.0 * e1 * e2) +
                          (1.0 - eta2) * (f1 * e2 + e1 * f2 + 2.0 * e1 * e2));
    return {s1.family, f};
}

// Outcome of a 2-to-1 purification attempt: success probability and the
// output state conditioned on success (already re-expressed in the input
// family; the twirl preserves fidelity).
struct PurifyResult {
    double success_prob;
    NoisyBellState out_state;
};

// 2-to-1 recurrence purification. F1 is bound to `kept` and F2 to
// `sacrificed`; the imperfect formulas are asymmetric in that binding.
//
// Perfect dephased:  p = F1*F2 + (1-F1)*(1-F2),  F' = F1*F2 / p
// Werner, with e_i = (1-F_i)/3, two noisy CNOTs and two noisy measurements:
//   p  = p_gate^2 * [ (eta^2+(1-eta)^2)*(F1*F2 + F1*e2 + e1*F2 + 5*e1*e2)
//                    + 2*eta*(1-eta)*(2*F1*e2 + 2*e1*F2 + 4*e1*e2) ]
//        + (1-p_gate^2)/2
//   F' = { p_gate^2 * [ (eta^2+(1-eta)^2)*(F1*F2 + e1*e2)
//                      + 2*eta*(1-eta)*(F1*e2 + e1*e2) ]
//          + (1-p_gate^2)/8 } / p
// which at p_gate = eta = 1 reduces to the perfect Werner rule.
inline PurifyResult purify(const NoisyBellState& kept, const NoisyBellState& sacrificed,
                           const OperationNoise& noise) {
    detail::require_same_family(kept, sacrificed, "purify");
    detail::require_perfect_for_dephased(kept, noise, "purify");
    const double f1 = kept.fidelity;
    const double f2 = sacrificed.fidelity;
    if (kept.family == StateFamily::Dephased) {
        const double ps = f1 * f2 + (1.0 - f1) * (1.0 - f2);
        const double fs = ps > 0.0 ? f1 * f2 / ps : 0.0;
        return {ps, {kept.family, fs}};
    }
    const double e1 = (1.0 - f1) / 3.0;
    const double e2 = (1.0 - f2) / 3.0;
    const double p2 = noise.p_gate * noise.p_gate;
    const double eta = noise.eta_meas;
    const double both = eta * eta + (1.0 - eta) * (1.0 - eta); // reports agree with outcomes
    const double cross = 2.0 * eta * (1.0 - eta);              // exactly one report flipped
    const double ps =
        p2 * (both * (f1 * f2 + f1 * e2 + e1 * f2 + 5.0 * e1 * e2) +
              cross * (2.0 * f1 * e2 + 2.0 * e1 * f2 + 4.0 * e1 * e2)) +
        (1.0 - p2) / 2.0;
    const double num =
        p2 * (both * (f1 * f2 + e1 * e2) + cross * (f1 * e2 + e1 * e2)) + (1.0 - p2) / 8.0;
    const double fs = ps > 0.0 ? num / ps : 0.0;
    return {ps, {kept.family, fs}};
}

} // namespace repsim
