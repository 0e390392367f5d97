#pragma once

#include "repsim/ops.hpp"
#include "repsim/rng.hpp"
#include "repsim/states.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

// Time-stepped Monte Carlo engine for one buffer-time window of the
// three-node chain (two end nodes, one swapping station, M memories per end
// node). Each time step is one generation attempt per free memory; stored
// fidelities are updated lazily, only when a pair is about to be consumed.
namespace repsim {

enum class LinkSide { Left, Right };

inline const char* side_name(LinkSide side) {
    return side == LinkSide::Left ? "left" : "right";
}

// One stored entangled pair on an elementary link. `id` is the creation
// order within the trial and breaks scheduling ties deterministically.
struct StoredPair {
    LinkSide side;
    NoisyBellState state;
    int created_step = 0;
    int last_update_step = 0;
    std::uint64_t id = 0;
};

struct SimConfig {
    StateFamily family = StateFamily::Werner;
    GenerationParams gen;
    OperationNoise noise;
    MemoryQuality quality = quality_factor(1.0, 1e-3);
    int M = 1;        // memories per end node
    int N_buffer = 1; // buffer time, in steps of quality.tau
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
};

inline void validate(const SimConfig& cfg) {
    validate(cfg.gen);
    validate(cfg.noise);
    if (cfg.M < 1) throw std::domain_error("M must be >= 1");
    if (cfg.N_buffer < 1) throw std::domain_error("N_buffer must be >= 1");
    if (cfg.trials < 1) throw std::domain_error("trials must be >= 1");
    if (!(cfg.quality.beta >= 0.0 && cfg.quality.beta <= 1.0))
        throw std::domain_error("quality factor must be in [0,1]");
    if (cfg.family == StateFamily::Dephased && !cfg.noise.is_perfect())
        throw std::domain_error("dephased family requires perfect operations");
}

struct TrialOutcome {
    bool success = false;
    double fidelity = -1.0; // delivered fidelity if success, -1 otherwise
    int purifications_left = 0;
    int purifications_right = 0;
};

enum class TrialPhase { Purification, Generation, FinalPurification };

// Optional hook into one trial's event stream; used by the event-trace CLI
// and by property tests. All callbacks default to no-ops.
class TrialObserver {
  public:
    virtual ~TrialObserver() = default;
    virtual void on_step_begin(int /*step*/) {}
    virtual void on_generated(int /*step*/, const StoredPair& /*pair*/) {}
    virtual void on_purify(int /*step*/, LinkSide /*side*/, const StoredPair& /*kept*/,
                           const StoredPair& /*sacrificed*/, const PurifyResult& /*result*/,
                           bool /*success*/) {}
    // Snapshot of one side's stored pairs after each phase of a step.
    virtual void on_phase_end(int /*step*/, TrialPhase /*phase*/, LinkSide /*side*/,
                              const std::vector<StoredPair>& /*pairs*/) {}
    virtual void on_swap(const StoredPair& /*left*/, const StoredPair& /*right*/,
                         bool /*success*/, double /*fidelity*/) {}
    virtual void on_no_swap(std::size_t /*left_pairs*/, std::size_t /*right_pairs*/) {}
};

namespace detail {

struct SideState {
    // Always sorted by (created_step, id): generation appends in id order
    // within the current step, and purification only ever removes the two
    // front pairs or rewrites the second one in place.
    std::vector<StoredPair> pairs;
    int purifications = 0;
};

inline void decay_to(StoredPair& pair, int step, const MemoryQuality& quality) {
    pair.state = decay(pair.state, step - pair.last_update_step, quality);
    pair.last_update_step = step;
}

// Purify until at most one pair remains: repeatedly take the two
// earliest-created pairs, keeping the later-generated one on success.
inline void purification_phase(SideState& side, LinkSide which, int step, const SimConfig& cfg,
                               RngStream& rng, TrialObserver* observer) {
    while (side.pairs.size() >= 2) {
        StoredPair& sacrificed = side.pairs[0];
        StoredPair& kept = side.pairs[1];
        decay_to(sacrificed, step, cfg.quality);
        decay_to(kept, step, cfg.quality);
        const PurifyResult result = purify(kept.state, sacrificed.state, cfg.noise);
        const bool success = rng.bernoulli(result.success_prob);
        ++side.purifications;
        if (observer) observer->on_purify(step, which, kept, sacrificed, result, success);
        if (success) {
            kept.state = result.out_state;
            side.pairs.erase(side.pairs.begin());
        } else {
            side.pairs.erase(side.pairs.begin(), side.pairs.begin() + 2);
        }
    }
}

inline void generation_phase(SideState& side, LinkSide which, int step, const SimConfig& cfg,
                             double p_g, RngStream& rng, std::uint64_t& next_id,
                             TrialObserver* observer) {
    const int free_memories = cfg.M - static_cast<int>(side.pairs.size());
    for (int i = 0; i < free_memories; ++i) {
        if (!rng.bernoulli(p_g)) continue;
        side.pairs.push_back(
            {which, make_state(cfg.family, cfg.gen.F0), step, step, next_id++});
        if (observer) observer->on_generated(step, side.pairs.back());
    }
}

} // namespace detail

// Run one buffer-time window: N_buffer generation/purification steps, one
// final purification round, then a single swap attempt. Consumes only `rng`
// for randomness, so a fixed stream fixes the outcome.
inline TrialOutcome run_trial(const SimConfig& cfg, RngStream& rng,
                              TrialObserver* observer = nullptr) {
    const double p_g = gen_success_prob(cfg.gen);
    detail::SideState sides[2];
    std::uint64_t next_id = 0;
    for (int step = 0; step < cfg.N_buffer; ++step) {
        if (observer) observer->on_step_begin(step);
        for (LinkSide which : {LinkSide::Left, LinkSide::Right}) {
            detail::SideState& side = sides[which == LinkSide::Left ? 0 : 1];
            detail::purification_phase(side, which, step, cfg, rng, observer);
            if (observer)
                observer->on_phase_end(step, TrialPhase::Purification, which, side.pairs);
            detail::generation_phase(side, which, step, cfg, p_g, rng, next_id, observer);
            if (observer)
                observer->on_phase_end(step, TrialPhase::Generation, which, side.pairs);
        }
    }
    // One final round of purification at the end of the window, then the swap.
    for (LinkSide which : {LinkSide::Left, LinkSide::Right}) {
        detail::SideState& side = sides[which == LinkSide::Left ? 0 : 1];
        detail::purification_phase(side, which, cfg.N_buffer, cfg, rng, observer);
        if (observer)
            observer->on_phase_end(cfg.N_buffer, TrialPhase::FinalPurification, which,
                                   side.pairs);
    }
    TrialOutcome outcome;
    outcome.purifications_left = sides[0].purifications;
    outcome.purifications_right = sides[1].purifications;
    if (sides[0].pairs.size() == 1 && sides[1].pairs.size() == 1) {
        StoredPair& left = sides[0].pairs[0];
        StoredPair& right = sides[1].pairs[0];
        detail::decay_to(left, cfg.N_buffer, cfg.quality);
        detail::decay_to(right, cfg.N_buffer, cfg.quality);
        const bool success = rng.bernoulli(cfg.gen.p_swap);
        double fidelity = -1.0;
        if (success) {
            fidelity = swap_states(left.state, right.state, cfg.noise).fidelity;
            outcome.success = true;
            outcome.fidelity = fidelity;
        }
        if (observer) observer->on_swap(left, right, success, fidelity);
    } else if (observer) {
        observer->on_no_swap(sides[0].pairs.size(), sides[1].pairs.size());
    }
    return outcome;
}

struct BatchResult {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double success_probability = 0.0;
    // Delivered fidelities of the successful trials, in trial order.
    std::vector<double> fidelities;
    // hist[k] = number of trials with exactly k purification attempts.
    std::vector<std::uint64_t> purification_hist_left;
    std::vector<std::uint64_t> purification_hist_right;
};

namespace detail {

inline void count_into(std::vector<std::uint64_t>& hist, int value) {
    if (hist.size() <= static_cast<std::size_t>(value)) hist.resize(value + 1, 0);
    ++hist[value];
}

} // namespace detail

// Run cfg.trials independent trials. Each trial draws from its own
// counter-based stream keyed by (seed, trial index) and results are reduced
// in trial order, so the output is a pure function of the config, whatever
// the thread count. threads == 0 picks the hardware concurrency.
inline BatchResult run_batch(const SimConfig& cfg, unsigned threads = 0) {
    validate(cfg);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, cfg.trials));
    std::vector<TrialOutcome> outcomes(cfg.trials);
    std::atomic<std::uint64_t> next_trial{0};
    auto worker = [&]() {
        for (;;) {
            const std::uint64_t t = next_trial.fetch_add(1, std::memory_order_relaxed);
            if (t >= cfg.trials) return;
            RngStream rng(cfg.seed, t);
            outcomes[t] = run_trial(cfg, rng);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    BatchResult batch;
    batch.trials = cfg.trials;
    for (const TrialOutcome& outcome : outcomes) {
        if (outcome.success) {
            ++batch.successes;
            batch.fidelities.push_back(outcome.fidelity);
        }
        detail::count_into(batch.purification_hist_left, outcome.purifications_left);
        detail::count_into(batch.purification_hist_right, outcome.purifications_right);
    }
    batch.success_probability =
        static_cast<double>(batch.successes) / static_cast<double>(batch.trials);
    return batch;
}

} // namespace repsim
