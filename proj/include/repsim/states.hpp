#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace repsim {

// The two noisy Bell-state families tracked by the simulator. Every pair in
// one simulation shares one family.
enum class StateFamily { Dephased, Werner };

inline const char* family_name(StateFamily family) {
    return family == StateFamily::Dephased ? "dephased" : "werner";
}

// Bell-diagonal two-qubit state identified by its fidelity F = <Phi+|rho|Phi+>.
//   dephased: F*Phi+ + (1-F)*Phi-
//   Werner:   F*Phi+ + (1-F)/3 * (Phi- + Psi+ + Psi-)
struct NoisyBellState {
    StateFamily family;
    double fidelity;
};

inline NoisyBellState make_state(StateFamily family, double fidelity) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0))
        throw std::domain_error("fidelity must be in [0,1], got " + std::to_string(fidelity));
    return {family, fidelity};
}

// Per-time-step memory decoherence factor beta = exp(-2*kappa*tau).
struct MemoryQuality {
    double beta;
    double kappa; // decoherence rate, 1/s
    double tau;   // time-step duration, s
};

inline MemoryQuality quality_factor(double kappa, double tau) {
    if (!(kappa >= 0.0)) throw std::domain_error("kappa must be >= 0");
    if (!(tau > 0.0)) throw std::domain_error("tau must be > 0");
    return {std::exp(-2.0 * kappa * tau), kappa, tau};
}

// Fidelity after n_steps idle time steps in memory:
//   dephased: F' = F*(1 + 2*b^n)/3 + (1 - b^n)/6
//   Werner:   F' = F*b^n + (1 - b^n)/4
// with b the per-step quality factor. Both maps are affine in b^n.
inline NoisyBellState decay(const NoisyBellState& s, long n_steps, const MemoryQuality& q) {
    if (n_steps < 0) throw std::domain_error("n_steps must be >= 0");
    const double bn = std::pow(q.beta, static_cast<double>(n_steps));
    double f = s.fidelity;
    switch (s.family) {
        case StateFamily::Dephased:
            f = f * (1.0 + 2.0 * bn) / 3.0 + (1.0 - bn) / 6.0;
            break;
        case StateFamily::Werner:
            f = f * bn + (1.0 - bn) / 4.0;
            break;
    }
    return {s.family, f};
}

} // namespace repsim
