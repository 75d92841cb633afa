#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "sic/model.hpp"
#include "sic/optim.hpp"
#include "sic/testbench.hpp"

namespace sic {

enum class Method { mnm, cg, adam };

const char* method_name(Method m);

/// Everything that determines one training run. Defaults are the desk-scale
/// profile: 15792 samples (a fifth of the full capture), M = 51, P = 8, N = 60.
struct ExperimentConfig {
    Method method = Method::mnm;

    std::size_t cg_iterations = 20;  // L
    double mu = 1.0;                 // outer step for MNM and CG
    double gamma = 1e-4;
    double lambda = 0.9;
    AdamConfig adam;  // total_steps is derived from epochs and block count

    std::size_t fir_taps = 51;   // M
    std::size_t basis_size = 8;  // P
    std::size_t block_length = 60;
    std::size_t epochs = 5;

    std::string dataset_path;     // empty: generate from the fields below
    std::string source = "pa";    // "pa" or "hammerstein"
    /// Transmit waveform: "ofdm", or "probe" (gen_amplitude_probe, only with
    /// source = hammerstein).
    std::string input = "ofdm";
    WaveformConfig waveform{.n_samples = 15792};
    NoiseConfig noise;
    std::uint64_t seed = 1;

    std::size_t nmse_eval_stride = 1;
    double target_db = -48.0;
    /// End the run at the first recorded NMSE at or below target_db.
    bool stop_at_target = false;
    /// Samples by which the canceller input is delayed relative to x. Negative
    /// selects D for PA data (centres the causal leakage response in the
    /// non-causal FIR window) and 0 for data produced by a Hammerstein model.
    long input_delay = -1;

    std::vector<std::size_t> compare_L{50, 30, 20, 10, 5, 1};

    void set_seed(std::uint64_t s);
    /// Structural checks; throws ConfigError.
    void validate() const;
};

/// Parses flat `key = value` text with `#` comments. Unknown keys throw.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Canonical `key = value` rendering, accepted back by parse_config.
std::string format_config(const ExperimentConfig& cfg);

/// Loads cfg.dataset_path or generates the configured synthetic dataset.
Dataset prepare_dataset(const ExperimentConfig& cfg);

struct CurvePoint {
    std::uint64_t update = 0;
    double epoch = 0.0;  // update * N / L_signal
    double nmse_db = 0.0;
    std::uint64_t cum_cost = 0;
};

struct LearningCurve {
    std::vector<CurvePoint> points;
    std::size_t stride = 1;
};

struct SummaryRow {
    std::string label;
    double epochs_to_target = std::numeric_limits<double>::infinity();
    double relative_complexity = 0.0;
    double final_nmse_db = 0.0;
    // Update index of a numerical abort; 0 when the run completed.
    std::uint64_t aborted_at = 0;
};

struct ExperimentResult {
    LearningCurve curve;
    SummaryRow summary;
    HammersteinModel model;
    std::uint64_t updates = 0;
    std::uint64_t cost_per_update = 0;
    std::string abort_reason;
};

std::string method_label(const ExperimentConfig& cfg);

/// Block updates in a full run: epochs * floor(signal_length / N). This is
/// also the Adam schedule length T.
std::uint64_t planned_updates(const ExperimentConfig& cfg, std::size_t signal_length);

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& ds);

/// Runs MNM, CG for each cfg.compare_L, and Adam on a shared dataset. A run
/// that aborts keeps its partial curve and last finite model, and reports the
/// abort through summary.aborted_at and abort_reason instead of throwing.
std::vector<ExperimentResult> run_comparison(const ExperimentConfig& cfg, const Dataset& ds);

/// First epoch coordinate with nmse_db <= target; +inf when never reached.
double epochs_to_target(const LearningCurve& curve, double target_db);

struct SummaryTable {
    std::string text;
    std::string csv;
};

SummaryTable summary_table(const std::vector<SummaryRow>& rows);

/// `update,epoch,nmse_db,cum_cost` with a header row.
std::string curve_csv(const LearningCurve& curve);
LearningCurve parse_curve_csv(const std::string& csv);

}  // namespace sic
