#include "repsim/config.hpp"
#include "repsim/metrics.hpp"
#include "repsim/protocol.hpp"
#include "repsim/report.hpp"
#include "repsim/verify.hpp"
#include "repsim/version.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

// Command-line front end: parameter sweeps with buffer-time optimization,
// closed-form-versus-oracle verification, and single-window event traces.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 verification
// failure, 4 I/O error.
namespace {

namespace fs = std::filesystem;

struct SweepArgs {
    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
};

struct VerifyArgs {
    double tolerance = 1e-10;
    std::string out_dir = ".";
};

struct TrialArgs {
    std::string config_path;
    int buffer = 1;
    int count = 5;
    int memories = 0; // 0: first entry of M_list
};

std::string density_name(int memories) {
    return "fidelity_density_M" + std::to_string(memories) + ".csv";
}

int run_sweep(const SweepArgs& args) {
    const repsim::RunConfig cfg = repsim::load_config(args.config_path);
    fs::create_directories(fs::path(args.out_dir) / "figures");
    std::vector<repsim::RateResult> all_rows;
    std::vector<repsim::RateResult> optima;
    std::vector<std::string> outputs;
    for (int memories : cfg.M_list) {
        repsim::SimConfig sim = repsim::sim_config_for(cfg, memories, cfg.N_buffer_min);
        const repsim::BufferSweep sweep =
            repsim::optimize_buffer(sim, cfg.N_buffer_min, cfg.N_buffer_max, args.threads);
        all_rows.insert(all_rows.end(), sweep.all.begin(), sweep.all.end());
        optima.push_back(sweep.best);
        std::cerr << "M=" << memories << ": optimal N_buffer=" << sweep.best.N_buffer
                  << " rate=" << sweep.best.rate << " ebits/s\n";

        // Conditional fidelity density at the optimal buffer time. Replaying
        // the batch is cheap and exact: same seed, same per-trial streams.
        sim.N_buffer = sweep.best.N_buffer;
        const repsim::BatchResult batch = repsim::run_batch(sim, args.threads);
        const auto density = repsim::fidelity_density(batch.fidelities, cfg.bins);
        const std::string csv_name = density_name(memories);
        repsim::report::write_text_file((fs::path(args.out_dir) / csv_name).string(),
                                        repsim::report::density_csv(density));
        outputs.push_back(csv_name);
        const std::string fig_name =
            "figures/fidelity_density_M" + std::to_string(memories) + ".svg";
        repsim::report::write_text_file(
            (fs::path(args.out_dir) / fig_name).string(),
            repsim::report::svg::histogram_chart(
                "Fidelity density, M=" + std::to_string(memories) +
                    ", N_buffer=" + std::to_string(sweep.best.N_buffer),
                "fidelity", "probability density", density));
        outputs.push_back(fig_name);
    }

    repsim::report::write_text_file((fs::path(args.out_dir) / "sweep.csv").string(),
                                    repsim::report::sweep_csv(all_rows));
    outputs.push_back("sweep.csv");
    repsim::report::write_text_file((fs::path(args.out_dir) / "optimal.json").string(),
                                    repsim::report::optimal_json(optima));
    outputs.push_back("optimal.json");

    repsim::report::svg::Series rate_series{"optimal rate", {}};
    repsim::report::svg::Series per_memory_series{"per-memory optimal rate", {}};
    repsim::report::svg::Series buffer_series{"optimal N_buffer", {}};
    for (const repsim::RateResult& r : optima) {
        rate_series.points.push_back({static_cast<double>(r.M), r.rate});
        per_memory_series.points.push_back({static_cast<double>(r.M), r.per_memory_rate});
        buffer_series.points.push_back({static_cast<double>(r.M), static_cast<double>(r.N_buffer)});
    }
    repsim::report::write_text_file(
        (fs::path(args.out_dir) / "figures/rate_vs_M.svg").string(),
        repsim::report::svg::line_chart("Optimized distribution rate vs memory count",
                                        "memories per end node M", "rate (ebits/s)",
                                        {rate_series, per_memory_series}));
    outputs.push_back("figures/rate_vs_M.svg");
    repsim::report::write_text_file(
        (fs::path(args.out_dir) / "figures/buffer_vs_M.svg").string(),
        repsim::report::svg::line_chart("Optimal buffer time vs memory count",
                                        "memories per end node M", "N_buffer (steps)",
                                        {buffer_series}));
    outputs.push_back("figures/buffer_vs_M.svg");

    repsim::report::write_text_file((fs::path(args.out_dir) / "manifest.json").string(),
                                    repsim::report::manifest_json("sweep", cfg, outputs));
    return 0;
}

int run_verify(const VerifyArgs& args) {
    const std::vector<repsim::VerifyRow> rows = repsim::run_verification_grid();
    fs::create_directories(args.out_dir);
    repsim::report::write_text_file((fs::path(args.out_dir) / "verify.csv").string(),
                                    repsim::report::verify_csv(rows));
    std::size_t flagged = 0;
    std::size_t failed = 0;
    double worst = 0.0;
    for (const repsim::VerifyRow& row : rows) {
        if (row.known_discrepancy) {
            ++flagged;
            continue;
        }
        worst = std::max(worst, row.abs_diff);
        if (!(row.abs_diff <= args.tolerance)) {
            ++failed;
            std::cerr << "FAIL " << row.check << " [" << row.inputs
                      << "] closed=" << row.closed_form << " oracle=" << row.oracle
                      << " diff=" << row.abs_diff << "\n";
        }
    }
    std::cout << rows.size() << " comparisons, " << failed << " failures, " << flagged
              << " known discrepancies, worst unflagged diff " << worst << " (tolerance "
              << args.tolerance << ")\n";
    return failed == 0 ? 0 : 3;
}

// Streams one trial's events as indented text.
class PrintingObserver final : public repsim::TrialObserver {
  public:
    void on_generated(int step, const repsim::StoredPair& pair) override {
        std::printf("  step %d: %s generated pair#%llu F=%.6g\n", step,
                    repsim::side_name(pair.side), static_cast<unsigned long long>(pair.id),
                    pair.state.fidelity);
    }
    void on_purify(int step, repsim::LinkSide side, const repsim::StoredPair& kept,
                   const repsim::StoredPair& sacrificed, const repsim::PurifyResult& result,
                   bool success) override {
        std::printf("  step %d: %s purify kept#%llu(F=%.6g) sacrificed#%llu(F=%.6g) "
                    "p=%.6g -> %s%s\n",
                    step, repsim::side_name(side), static_cast<unsigned long long>(kept.id),
                    kept.state.fidelity, static_cast<unsigned long long>(sacrificed.id),
                    sacrificed.state.fidelity, result.success_prob,
                    success ? "success" : "failure",
                    success ? (" F=" + std::to_string(result.out_state.fidelity)).c_str() : "");
    }
    void on_swap(const repsim::StoredPair& left, const repsim::StoredPair& right, bool success,
                 double fidelity) override {
        std::printf("  swap: left#%llu(F=%.6g) x right#%llu(F=%.6g) -> %s",
                    static_cast<unsigned long long>(left.id), left.state.fidelity,
                    static_cast<unsigned long long>(right.id), right.state.fidelity,
                    success ? "success" : "failure");
        if (success) std::printf(" F=%.6g", fidelity);
        std::printf("\n");
    }
    void on_no_swap(std::size_t left_pairs, std::size_t right_pairs) override {
        std::printf("  swap skipped: left holds %zu pair(s), right holds %zu\n", left_pairs,
                    right_pairs);
    }
};

int run_trials(const TrialArgs& args) {
    const repsim::RunConfig cfg = repsim::load_config(args.config_path);
    const int memories = args.memories > 0 ? args.memories : cfg.M_list.front();
    repsim::SimConfig sim = repsim::sim_config_for(cfg, memories, args.buffer);
    repsim::validate(sim);
    for (int t = 0; t < args.count; ++t) {
        std::printf("trial %d (M=%d, N_buffer=%d, seed=%llu)\n", t, memories, args.buffer,
                    static_cast<unsigned long long>(cfg.seed));
        repsim::RngStream rng(cfg.seed, static_cast<std::uint64_t>(t));
        PrintingObserver observer;
        const repsim::TrialOutcome outcome = repsim::run_trial(sim, rng, &observer);
        if (outcome.success)
            std::printf("  outcome: success fidelity=%.6g", outcome.fidelity);
        else
            std::printf("  outcome: failure fidelity=-1");
        std::printf(" purifications left=%d right=%d\n", outcome.purifications_left,
                    outcome.purifications_right);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator of a two-link quantum repeater chain "
                 "with buffered entanglement purification"};
    app.set_version_flag("--version", repsim::kVersion);
    app.require_subcommand(1);

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Optimize buffer time over a memory-count sweep and write CSV/JSON/SVG results");
    sweep->add_option("config", sweep_args.config_path, "experiment config file")->required();
    sweep->add_option("-o,--out", sweep_args.out_dir, "output directory")->required();
    sweep->add_option("--threads", sweep_args.threads, "worker threads (0 = hardware)")
        ->envname("SIM_THREADS");

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand(
        "verify", "Check every closed-form update rule against the density-matrix oracle");
    verify->add_option("--tol", verify_args.tolerance, "comparison tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify->add_option("-o,--out", verify_args.out_dir, "directory for verify.csv")
        ->capture_default_str();

    TrialArgs trial_args;
    CLI::App* trial =
        app.add_subcommand("trial", "Trace a few single-window trials event by event");
    trial->add_option("config", trial_args.config_path, "experiment config file")->required();
    trial->add_option("--buffer", trial_args.buffer, "buffer time N_buffer in steps")
        ->required()
        ->check(CLI::Range(1, 1000000));
    trial->add_option("--count", trial_args.count, "number of trials to trace")
        ->check(CLI::Range(1, 1000))
        ->capture_default_str();
    trial->add_option("--memories", trial_args.memories,
                      "memories per end node (default: first M_list entry)")
        ->check(CLI::Range(1, 1000000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sweep->parsed()) return run_sweep(sweep_args);
        if (verify->parsed()) return run_verify(verify_args);
        if (trial->parsed()) return run_trials(trial_args);
    } catch (const repsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
