#pragma once

#include "repsim/protocol.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

// Rate and fidelity metrics: distillable-entanglement (Rains) bound, average
// distribution rate over a buffer window, buffer-time optimization, and the
// conditional fidelity density.
namespace repsim {

// Base-2 binary entropy with H(0) = H(1) = 0 by continuity.
inline double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy needs x in [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// Distillable entanglement of a Bell-diagonal state with fidelity F, in
// ebits: 1 - H_b(F) above F = 1/2 and zero at or below it (a fidelity-1/2
// Bell-diagonal mixture is separable-adjacent and yields nothing).
inline double rains_bound(double fidelity) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0))
        throw std::domain_error("rains_bound needs F in [0,1]");
    if (fidelity <= 0.5) return 0.0;
    return 1.0 - binary_entropy(fidelity);
}

struct RateResult {
    int N_buffer = 0;
    int M = 0;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double p_succ = 0.0;
    std::optional<double> mean_fidelity; // absent when no trial succeeded
    double rains = 0.0;                  // ebits
    double rate = 0.0;                   // ebits / second
    double per_memory_rate = 0.0;        // ebits / second / memory
};

// Average entanglement distribution rate over the buffer window:
//   R = p_succ * R_rains(F_mean) / t_buffer,   t_buffer = N_buffer * tau.
inline RateResult rate_from_batch(const BatchResult& batch, const SimConfig& cfg) {
    RateResult r;
    r.N_buffer = cfg.N_buffer;
    r.M = cfg.M;
    r.trials = batch.trials;
    r.successes = batch.successes;
    r.p_succ = batch.success_probability;
    if (!batch.fidelities.empty()) {
        double sum = 0.0;
        for (double f : batch.fidelities) sum += f;
        const double mean = sum / static_cast<double>(batch.fidelities.size());
        r.mean_fidelity = mean;
        r.rains = rains_bound(std::min(1.0, std::max(0.0, mean)));
    }
    const double t_buffer = static_cast<double>(cfg.N_buffer) * cfg.quality.tau;
    r.rate = r.p_succ * r.rains / t_buffer;
    r.per_memory_rate = r.rate / static_cast<double>(cfg.M);
    return r;
}

struct BufferSweep {
    RateResult best;
    std::vector<RateResult> all; // ordered by N_buffer
};

// Sweep N_buffer over [n_min, n_max] and pick the rate-maximizing window
// (ties go to the smaller buffer). The config's own N_buffer is ignored.
inline BufferSweep optimize_buffer(SimConfig cfg, int n_min, int n_max, unsigned threads = 0) {
    if (n_min < 1 || n_max < n_min) throw std::domain_error("need 1 <= n_min <= n_max");
    BufferSweep sweep;
    for (int n = n_min; n <= n_max; ++n) {
        cfg.N_buffer = n;
        const RateResult r = rate_from_batch(run_batch(cfg, threads), cfg);
        if (sweep.all.empty() || r.rate > sweep.best.rate) sweep.best = r;
        sweep.all.push_back(r);
    }
    return sweep;
}

struct DensityBin {
    double center = 0.0;
    double density = 0.0;
};

// Normalized histogram of fidelity samples over [0,1]: sum(density) * width
// equals 1 for nonempty input. Empty input yields an empty histogram.
inline std::vector<DensityBin> fidelity_density(const std::vector<double>& samples, int bins) {
    if (bins < 1) throw std::domain_error("bins must be >= 1");
    if (samples.empty()) return {};
    const double width = 1.0 / static_cast<double>(bins);
    std::vector<std::uint64_t> counts(bins, 0);
    for (double f : samples) {
        if (!(f >= 0.0 && f <= 1.0))
            throw std::domain_error("fidelity samples must lie in [0,1]");
        int idx = static_cast<int>(f * bins);
        if (idx >= bins) idx = bins - 1;
        ++counts[idx];
    }
    std::vector<DensityBin> out(bins);
    const double norm = 1.0 / (static_cast<double>(samples.size()) * width);
    for (int i = 0; i < bins; ++i) {
        out[i].center = (i + 0.5) * width;
        out[i].density = static_cast<double>(counts[i]) * norm;
    }
    return out;
}

} // namespace repsim
