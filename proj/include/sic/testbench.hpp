#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sic/linalg.hpp"
#include "sic/model.hpp"

namespace sic {

struct WaveformConfig {
    double bandwidth_hz = 60e6;
    double sample_rate_hz = 484e6;
    std::size_t n_samples = 78960;
    unsigned qam_order = 16;
    std::size_t fft_size = 1024;
    std::size_t cp_len = 72;
    /// Crest-factor limit applied per symbol by iterative clipping and
    /// in-band filtering. Non-positive disables it.
    double papr_limit_db = 0.0;
    std::size_t cfr_iterations = 4;
    std::uint64_t seed = 1;
};

/// ceil(fft_size * bandwidth / sample_rate): number of loaded subcarriers.
std::size_t occupied_bins(const WaveformConfig& cfg);

/// CP-OFDM with QAM on the central occupied bins (DC left empty), unit
/// average power. Deterministic in cfg.seed. When papr_limit_db > 0 each
/// symbol is clipped to that peak-to-average ratio and re-filtered to the
/// occupied bins, cfr_iterations times.
ComplexVector gen_ofdm(const WaveformConfig& cfg);

/// Memoryless odd-order polynomial PA:
///   y = c1 x + c3 x|x|^2 + c5 x|x|^4 + c7 x|x|^6,
/// optionally rescaled to unit average output power.
struct PaSimModel {
    cplx c1{1.0, 0.0};
    cplx c3{};
    cplx c5{};
    cplx c7{};
    bool normalize_output = false;

    /// Mildly compressive PA used by the default testbench.
    static PaSimModel reference();

    cplx gain(double amplitude) const;
};

ComplexVector pa_apply(ComplexSpan x, const PaSimModel& pa);

/// TX->RX leakage path as a causal FIR filter.
struct LeakageChannel {
    ComplexVector taps;
    std::uint64_t seed = 0;
};

/// Complex Gaussian taps with power decaying by `decay_db_per_tap`, unit energy.
LeakageChannel make_leakage_channel(std::uint64_t seed, std::size_t order = 50, double decay_db_per_tap = 0.5);

/// Causal convolution with zero initial state; output length == input length.
ComplexVector fir_filter(ComplexSpan x, const LeakageChannel& ch);

struct NoiseConfig {
    bool enabled = true;
    double level_db = -60.0;  // relative to interference power
    std::uint64_t seed = 3;
};

/// Complex white Gaussian noise with total power `power` per sample.
ComplexVector white_noise(std::size_t n, double power, std::uint64_t seed);

struct Dataset {
    ComplexVector x;  // transmit samples
    ComplexVector d;  // self-interference at the receiver
    std::string metadata;  // JSON object text

    std::size_t size() const { return x.size(); }
};

/// x = gen_ofdm(wcfg); d = fir_filter(pa_apply(x)) (+ noise).
Dataset make_dataset(const WaveformConfig& wcfg, const PaSimModel& pa, const LeakageChannel& ch,
                     const NoiseConfig& noise = {});

/// Ground-truth Hammerstein model with gains sampled from the reference PA
/// curve at the knots and FIR taps from a seeded leakage channel.
HammersteinModel make_truth_model(ComplexSpan x, std::size_t fir_taps, std::size_t basis_size,
                                  std::uint64_t channel_seed);

/// I.i.d. samples with amplitude uniform on [0, sqrt(3)] and uniform phase,
/// so unit average power and every amplitude range is visited at the same
/// rate. Used as a persistently exciting identification input.
ComplexVector gen_amplitude_probe(std::size_t n, std::uint64_t seed);

/// d = truth.forward(x) (+ noise). The truth model lies in the canceller's
/// own model family. `input` names the waveform in the metadata.
Dataset make_matched_dataset(ComplexVector x, const HammersteinModel& truth, const NoiseConfig& noise,
                             const std::string& input = "custom");
/// Same, with x = gen_ofdm(wcfg).
Dataset make_matched_dataset(const WaveformConfig& wcfg, const HammersteinModel& truth, const NoiseConfig& noise);

struct Block {
    std::span<const cplx> x;
    std::span<const cplx> d;
    std::size_t offset = 0;
};

/// Contiguous non-overlapping blocks; a trailing partial block is dropped.
std::vector<Block> block_iter(const Dataset& ds, std::size_t n_block);

/// Binary layout (little-endian): "SICD", u32 version, u64 length,
/// length x (re, im) float64, length d (re, im) float64, metadata JSON.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace sic
