#include "repsim/ops.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

namespace {

using repsim::gen_success_prob;
using repsim::GenerationParams;
using repsim::make_state;
using repsim::NoisyBellState;
using repsim::OperationNoise;
using repsim::purify;
using repsim::PurifyResult;
using repsim::StateFamily;
using repsim::swap_states;

constexpr OperationNoise kPerfect{};

TEST(Generation, DefaultSuccessProbability) {
    EXPECT_DOUBLE_EQ(gen_success_prob(GenerationParams{}), std::exp(-1.0) * 0.1);
}

TEST(Generation, ScalesWithLengthAndEfficiency) {
    GenerationParams g;
    g.L0_km = 40.0;
    EXPECT_DOUBLE_EQ(gen_success_prob(g), std::exp(-2.0) * 0.1);
    g.eta_h = 1.0;
    EXPECT_DOUBLE_EQ(gen_success_prob(g), std::exp(-2.0));
}

TEST(Generation, Validation) {
    GenerationParams g;
    g.L0_km = 0.0;
    EXPECT_THROW(repsim::validate(g), std::domain_error);
    g = {};
    g.eta_h = 1.5;
    EXPECT_THROW(repsim::validate(g), std::domain_error);
    g = {};
    g.p_swap = -0.1;
    EXPECT_THROW(repsim::validate(g), std::domain_error);
}

TEST(OperationNoiseChecks, PerfectAndValidation) {
    EXPECT_TRUE(kPerfect.is_perfect());
    EXPECT_FALSE((OperationNoise{0.9, 1.0}).is_perfect());
    OperationNoise n{1.2, 1.0};
    EXPECT_THROW(repsim::validate(n), std::domain_error);
    n = {1.0, -0.2};
    EXPECT_THROW(repsim::validate(n), std::domain_error);
}

TEST(Swap, DephasedPerfect) {
    auto d = [](double f) { return make_state(StateFamily::Dephased, f); };
    EXPECT_DOUBLE_EQ(swap_states(d(1.0), d(1.0), kPerfect).fidelity, 1.0);
    // A perfect first link passes the second one's fidelity through.
    EXPECT_DOUBLE_EQ(swap_states(d(1.0), d(0.8), kPerfect).fidelity, 0.8);
    EXPECT_DOUBLE_EQ(swap_states(d(0.5), d(0.9), kPerfect).fidelity, 0.5);
    EXPECT_NEAR(swap_states(d(0.9), d(0.8), kPerfect).fidelity, 0.9 * 0.8 + 0.1 * 0.2, 1e-15);
}

TEST(Swap, WernerPerfect) {
    auto w = [](double f) { return make_state(StateFamily::Werner, f); };
    EXPECT_DOUBLE_EQ(swap_states(w(1.0), w(1.0), kPerfect).fidelity, 1.0);
    EXPECT_NEAR(swap_states(w(0.9), w(0.9), kPerfect).fidelity, 0.81 + 0.01 / 3.0, 1e-15);
    // Fully depolarized input wipes the output to 1/4.
    EXPECT_NEAR(swap_states(w(0.25), w(1.0), kPerfect).fidelity, 0.25, 1e-15);
}

TEST(Swap, WernerImperfectFrozenValue) {
    // F1=0.95, F2=0.9, p_gate=0.9, eta_meas=0.9. Exact rational arithmetic
    // gives 147978/225000 = 0.65768.
    const NoisyBellState s1 = make_state(StateFamily::Werner, 0.95);
    const NoisyBellState s2 = make_state(StateFamily::Werner, 0.90);
    EXPECT_NEAR(swap_states(s1, s2, OperationNoise{0.9, 0.9}).fidelity, 0.65768, 1e-12);
}

TEST(Swap, WernerImperfectLimits) {
    auto w = [](double f) { return make_state(StateFamily::Werner, f); };
    // Fully depolarizing gate: output is maximally mixed regardless of inputs.
    EXPECT_NEAR(swap_states(w(1.0), w(1.0), OperationNoise{0.0, 1.0}).fidelity, 0.25, 1e-15);
    // Random measurement reports (eta = 1/2) on perfect inputs: the Pauli
    // correction matches the true outcome pattern only 1/4 of the time, and
    // any wrong correction lands on an orthogonal Bell state.
    const double f = swap_states(w(1.0), w(1.0), OperationNoise{1.0, 0.5}).fidelity;
    EXPECT_NEAR(f, 0.25, 1e-15);
}

TEST(Swap, FamilyAndNoiseGuards) {
    const NoisyBellState d = make_state(StateFamily::Dephased, 0.9);
    const NoisyBellState w = make_state(StateFamily::Werner, 0.9);
    EXPECT_THROW(swap_states(d, w, kPerfect), std::invalid_argument);
    EXPECT_THROW(swap_states(d, d, OperationNoise{0.9, 1.0}), std::invalid_argument);
    EXPECT_NO_THROW(swap_states(w, w, OperationNoise{0.9, 0.9}));
}

TEST(Purify, DephasedPerfect) {
    auto d = [](double f) { return make_state(StateFamily::Dephased, f); };
    const PurifyResult ideal = purify(d(1.0), d(1.0), kPerfect);
    EXPECT_DOUBLE_EQ(ideal.success_prob, 1.0);
    EXPECT_DOUBLE_EQ(ideal.out_state.fidelity, 1.0);

    const PurifyResult half = purify(d(0.5), d(0.5), kPerfect);
    EXPECT_DOUBLE_EQ(half.success_prob, 0.5);
    EXPECT_DOUBLE_EQ(half.out_state.fidelity, 0.5);

    const PurifyResult r = purify(d(0.9), d(0.8), kPerfect);
    EXPECT_NEAR(r.success_prob, 0.74, 1e-15);
    EXPECT_NEAR(r.out_state.fidelity, 36.0 / 37.0, 1e-15);
    EXPECT_GT(r.out_state.fidelity, 0.9); // purification gained fidelity
}

TEST(Purify, DephasedDegenerateInputs) {
    auto d = [](double f) { return make_state(StateFamily::Dephased, f); };
    // Orthogonal error pattern: the parity check always rejects.
    const PurifyResult r = purify(d(1.0), d(0.0), kPerfect);
    EXPECT_DOUBLE_EQ(r.success_prob, 0.0);
    EXPECT_DOUBLE_EQ(r.out_state.fidelity, 0.0);
}

TEST(Purify, WernerPerfectFrozenValue) {
    // F1 = F2 = 0.9: success probability 197/225, output fidelity 365/394
    // (exact rational arithmetic).
    auto w = [](double f) { return make_state(StateFamily::Werner, f); };
    const PurifyResult r = purify(w(0.9), w(0.9), kPerfect);
    EXPECT_NEAR(r.success_prob, 197.0 / 225.0, 1e-15);
    EXPECT_NEAR(r.out_state.fidelity, 365.0 / 394.0, 1e-15);
    EXPECT_GT(r.out_state.fidelity, 0.9);

    // The 1/4 fixed point of the Werner family is preserved.
    const PurifyResult fixed = purify(w(0.25), w(0.25), kPerfect);
    EXPECT_NEAR(fixed.out_state.fidelity, 0.25, 1e-15);
    EXPECT_NEAR(fixed.success_prob, 0.5, 1e-15);
}

TEST(Purify, WernerAsymmetricInKeptPair) {
    // The noisy formulas bind F1 to the kept pair; with unequal inputs and
    // imperfect measurements the two orderings differ.
    auto w = [](double f) { return make_state(StateFamily::Werner, f); };
    const OperationNoise noise{1.0, 0.9};
    const PurifyResult ab = purify(w(0.95), w(0.7), noise);
    const PurifyResult ba = purify(w(0.7), w(0.95), noise);
    EXPECT_GT(std::abs(ab.out_state.fidelity - ba.out_state.fidelity), 1e-3);
    EXPECT_NEAR(ab.success_prob, ba.success_prob, 1e-15); // acceptance is symmetric
}

TEST(Purify, WernerImperfectReducesToPerfectAtUnitNoise) {
    for (double f1 : {0.5, 0.7, 0.9, 1.0}) {
        for (double f2 : {0.5, 0.7, 0.9, 1.0}) {
            const double e1 = (1.0 - f1) / 3.0;
            const double e2 = (1.0 - f2) / 3.0;
            const double p_perfect = f1 * f2 + f1 * e2 + e1 * f2 + 5.0 * e1 * e2;
            const double f_perfect = (f1 * f2 + e1 * e2) / p_perfect;
            const PurifyResult r = purify(make_state(StateFamily::Werner, f1),
                                          make_state(StateFamily::Werner, f2), kPerfect);
            EXPECT_NEAR(r.success_prob, p_perfect, 1e-15);
            EXPECT_NEAR(r.out_state.fidelity, f_perfect, 1e-15);
        }
    }
}

TEST(Purify, FullyDepolarizingGatesGiveCoinFlip) {
    auto w = [](double f) { return make_state(StateFamily::Werner, f); };
    const PurifyResult r = purify(w(1.0), w(1.0), OperationNoise{0.0, 1.0});
    EXPECT_NEAR(r.success_prob, 0.5, 1e-15);
    EXPECT_NEAR(r.out_state.fidelity, 0.25, 1e-15);
}

TEST(Purify, FamilyAndNoiseGuards) {
    const NoisyBellState d = make_state(StateFamily::Dephased, 0.9);
    const NoisyBellState w = make_state(StateFamily::Werner, 0.9);
    EXPECT_THROW(purify(d, w, kPerfect), std::invalid_argument);
    EXPECT_THROW(purify(d, d, OperationNoise{1.0, 0.9}), std::invalid_argument);
}

} // namespace
