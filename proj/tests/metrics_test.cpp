#include "repsim/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <vector>

namespace {

using namespace repsim;

TEST(BinaryEntropy, KnownValuesAndSymmetry) {
    EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
    EXPECT_DOUBLE_EQ(binary_entropy(0.0), 0.0);
    EXPECT_DOUBLE_EQ(binary_entropy(1.0), 0.0);
    EXPECT_NEAR(binary_entropy(0.9), 0.46899559358928122, 1e-12);
    for (double x : {0.1, 0.25, 0.4}) {
        EXPECT_NEAR(binary_entropy(x), binary_entropy(1.0 - x), 1e-15);
    }
    EXPECT_THROW(binary_entropy(-0.1), std::domain_error);
    EXPECT_THROW(binary_entropy(1.1), std::domain_error);
}

TEST(RainsBound, ZeroAtOrBelowHalfRisingToOne) {
    EXPECT_DOUBLE_EQ(rains_bound(1.0), 1.0);
    EXPECT_DOUBLE_EQ(rains_bound(0.5), 0.0);
    EXPECT_DOUBLE_EQ(rains_bound(0.3), 0.0);
    EXPECT_DOUBLE_EQ(rains_bound(0.0), 0.0);
    EXPECT_NEAR(rains_bound(0.9), 0.53100440641071878, 1e-12);
    double prev = 0.0;
    for (double f = 0.55; f <= 1.0001; f += 0.05) {
        const double r = rains_bound(std::min(f, 1.0));
        EXPECT_GT(r, prev);
        prev = r;
    }
    EXPECT_THROW(rains_bound(-0.1), std::domain_error);
    EXPECT_THROW(rains_bound(1.5), std::domain_error);
}

SimConfig metrics_config(int m, int n_buffer, double tau) {
    SimConfig cfg;
    cfg.M = m;
    cfg.N_buffer = n_buffer;
    cfg.quality = MemoryQuality{1.0, 0.0, tau};
    return cfg;
}

TEST(RateFromBatch, PerfectBatchHitsClosedFormRate) {
    BatchResult batch;
    batch.trials = 4;
    batch.successes = 4;
    batch.success_probability = 1.0;
    batch.fidelities = {1.0, 1.0, 1.0, 1.0};
    const SimConfig cfg = metrics_config(2, 1, 1e-3);
    const RateResult r = rate_from_batch(batch, cfg);
    ASSERT_TRUE(r.mean_fidelity.has_value());
    EXPECT_DOUBLE_EQ(*r.mean_fidelity, 1.0);
    EXPECT_DOUBLE_EQ(r.rains, 1.0);
    EXPECT_DOUBLE_EQ(r.rate, 1000.0);
    EXPECT_DOUBLE_EQ(r.per_memory_rate, 500.0);
}

TEST(RateFromBatch, CarriesCountsAndComposesRains) {
    BatchResult batch;
    batch.trials = 4;
    batch.successes = 2;
    batch.success_probability = 0.5;
    batch.fidelities = {0.9, 0.7};
    const SimConfig cfg = metrics_config(4, 5, 1e-3);
    const RateResult r = rate_from_batch(batch, cfg);
    EXPECT_EQ(r.N_buffer, 5);
    EXPECT_EQ(r.M, 4);
    EXPECT_EQ(r.trials, 4u);
    EXPECT_EQ(r.successes, 2u);
    ASSERT_TRUE(r.mean_fidelity.has_value());
    EXPECT_DOUBLE_EQ(*r.mean_fidelity, 0.8);
    EXPECT_DOUBLE_EQ(r.rains, rains_bound(0.8));
    EXPECT_DOUBLE_EQ(r.rate, 0.5 * rains_bound(0.8) / (5.0 * 1e-3));
    EXPECT_DOUBLE_EQ(r.per_memory_rate, r.rate / 4.0);
}

TEST(RateFromBatch, NoSuccessesMeansZeroRateAndNoMean) {
    BatchResult batch;
    batch.trials = 10;
    const SimConfig cfg = metrics_config(1, 3, 1e-3);
    const RateResult r = rate_from_batch(batch, cfg);
    EXPECT_FALSE(r.mean_fidelity.has_value());
    EXPECT_DOUBLE_EQ(r.p_succ, 0.0);
    EXPECT_DOUBLE_EQ(r.rains, 0.0);
    EXPECT_DOUBLE_EQ(r.rate, 0.0);
    EXPECT_DOUBLE_EQ(r.per_memory_rate, 0.0);
}

SimConfig sweep_config() {
    SimConfig cfg;
    cfg.family = StateFamily::Werner;
    cfg.gen.eta_h = 0.5;
    cfg.gen.p_swap = 0.8;
    cfg.quality = quality_factor(10.0, 1e-3);
    cfg.M = 1;
    cfg.trials = 500;
    cfg.seed = 9;
    return cfg;
}

TEST(OptimizeBuffer, PicksTheFirstRateMaximum) {
    const BufferSweep sweep = optimize_buffer(sweep_config(), 1, 6, 1);
    ASSERT_EQ(sweep.all.size(), 6u);
    double best_rate = -1.0;
    int best_n = 0;
    for (const RateResult& r : sweep.all) {
        if (r.rate > best_rate) {
            best_rate = r.rate;
            best_n = r.N_buffer;
        }
    }
    EXPECT_DOUBLE_EQ(sweep.best.rate, best_rate);
    EXPECT_EQ(sweep.best.N_buffer, best_n);
    for (std::size_t i = 0; i < sweep.all.size(); ++i) {
        EXPECT_EQ(sweep.all[i].N_buffer, static_cast<int>(i) + 1);
    }
}

TEST(OptimizeBuffer, TiesGoToTheSmallestBuffer) {
    SimConfig cfg = sweep_config();
    cfg.gen.eta_h = 0.0; // rate is identically zero
    const BufferSweep sweep = optimize_buffer(cfg, 2, 5, 1);
    EXPECT_EQ(sweep.best.N_buffer, 2);
    EXPECT_DOUBLE_EQ(sweep.best.rate, 0.0);
}

TEST(OptimizeBuffer, RejectsBadRanges) {
    EXPECT_THROW(optimize_buffer(sweep_config(), 0, 5, 1), std::domain_error);
    EXPECT_THROW(optimize_buffer(sweep_config(), 4, 3, 1), std::domain_error);
}

TEST(FidelityDensity, PointMassLandsInTheTopBin) {
    const std::vector<double> samples(25, 1.0);
    const auto bins = fidelity_density(samples, 100);
    ASSERT_EQ(bins.size(), 100u);
    EXPECT_DOUBLE_EQ(bins.back().density, 100.0);
    EXPECT_DOUBLE_EQ(bins.back().center, 0.995);
    for (std::size_t i = 0; i + 1 < bins.size(); ++i) EXPECT_DOUBLE_EQ(bins[i].density, 0.0);
}

TEST(FidelityDensity, UniformSamplesGiveUnitDensity) {
    std::vector<double> samples;
    for (int i = 0; i < 50; ++i) samples.push_back((i + 0.5) / 50.0);
    const auto bins = fidelity_density(samples, 10);
    ASSERT_EQ(bins.size(), 10u);
    for (const auto& b : bins) EXPECT_DOUBLE_EQ(b.density, 1.0);
}

TEST(FidelityDensity, IntegratesToOne) {
    std::vector<double> samples = {0.0, 0.12, 0.377, 0.5, 0.5, 0.73, 0.99, 1.0};
    const auto bins = fidelity_density(samples, 37);
    double integral = 0.0;
    for (const auto& b : bins) integral += b.density;
    integral /= 37.0;
    EXPECT_NEAR(integral, 1.0, 1e-9);
}

TEST(FidelityDensity, EdgeCasesAndValidation) {
    EXPECT_TRUE(fidelity_density({}, 10).empty());
    EXPECT_THROW(fidelity_density({0.5}, 0), std::domain_error);
    EXPECT_THROW(fidelity_density({-0.01}, 10), std::domain_error);
    EXPECT_THROW(fidelity_density({1.01}, 10), std::domain_error);
}

} // namespace
