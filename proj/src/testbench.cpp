#include "sic/testbench.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>

#include <json.hpp>

#include "sic/errors.hpp"

namespace sic {

namespace {

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

void validate(const WaveformConfig& cfg) {
    if (!(cfg.sample_rate_hz > 0.0)) throw ConfigError("waveform: sample_rate_hz must be positive");
    if (!(cfg.bandwidth_hz > 0.0) || cfg.bandwidth_hz >= cfg.sample_rate_hz)
        throw ConfigError("waveform: bandwidth must be positive and below the sample rate");
    if (cfg.n_samples == 0) throw ConfigError("waveform: n_samples must be positive");
    if (cfg.fft_size < 4) throw ConfigError("waveform: fft_size too small");
    const auto side = static_cast<unsigned>(std::lround(std::sqrt(static_cast<double>(cfg.qam_order))));
    if (cfg.qam_order < 4 || side * side != cfg.qam_order)
        throw ConfigError("waveform: qam_order must be a square constellation size (4, 16, 64, ...)");
    if (occupied_bins(cfg) + 1 > cfg.fft_size) throw ConfigError("waveform: occupied bins exceed fft_size");
}

void normalize_power(ComplexVector& v) {
    double p = 0.0;
    for (const auto& s : v) p += std::norm(s);
    p /= static_cast<double>(v.size());
    if (p <= 0.0) return;
    const double scale = 1.0 / std::sqrt(p);
    for (auto& s : v) s *= scale;
}

nlohmann::json to_json(const WaveformConfig& c) {
    return {{"bandwidth_hz", c.bandwidth_hz}, {"sample_rate_hz", c.sample_rate_hz},
            {"n_samples", c.n_samples},       {"qam_order", c.qam_order},
            {"fft_size", c.fft_size},         {"cp_len", c.cp_len},
            {"papr_limit_db", c.papr_limit_db}, {"cfr_iterations", c.cfr_iterations},
            {"seed", c.seed}};
}

nlohmann::json to_json(const NoiseConfig& n) {
    return {{"enabled", n.enabled}, {"level_db", n.level_db}, {"seed", n.seed}};
}

nlohmann::json to_json(cplx v) { return nlohmann::json::array({v.real(), v.imag()}); }

void add_noise(ComplexVector& d, const NoiseConfig& noise) {
    if (!noise.enabled) return;
    double p = 0.0;
    for (const auto& s : d) p += std::norm(s);
    p /= static_cast<double>(d.size());
    const ComplexVector n = white_noise(d.size(), p * std::pow(10.0, noise.level_db / 10.0), noise.seed);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += n[i];
}

template <class T>
void write_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T read_le(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw ConfigError("dataset file: truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

constexpr char kMagic[4] = {'S', 'I', 'C', 'D'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::size_t occupied_bins(const WaveformConfig& cfg) {
    return static_cast<std::size_t>(
        std::ceil(static_cast<double>(cfg.fft_size) * cfg.bandwidth_hz / cfg.sample_rate_hz));
}

ComplexVector gen_ofdm(const WaveformConfig& cfg) {
    validate(cfg);
    const std::size_t nfft = cfg.fft_size;
    const std::size_t n_occ = occupied_bins(cfg);
    const std::size_t n_neg = n_occ / 2;
    const std::size_t n_pos = n_occ - n_neg;
    const std::size_t sym_len = nfft + cfg.cp_len;
    const std::size_t n_sym = (cfg.n_samples + sym_len - 1) / sym_len;
    const auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cfg.qam_order))));

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> level(0, side - 1);
    auto qam = [&] { return cplx(2.0 * level(rng) - (side - 1), 2.0 * level(rng) - (side - 1)); };

    std::vector<fftw_complex> freq(nfft), time(nfft);
    fftw_plan plan, analysis;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(nfft), freq.data(), time.data(), FFTW_BACKWARD, FFTW_ESTIMATE);
        analysis = fftw_plan_dft_1d(static_cast<int>(nfft), time.data(), freq.data(), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    std::vector<bool> occupied(nfft, false);
    for (std::size_t k = 1; k <= n_pos; ++k) occupied[k] = true;
    for (std::size_t k = 1; k <= n_neg; ++k) occupied[nfft - k] = true;
    const bool limit_crest = cfg.papr_limit_db > 0.0;
    const double papr_ratio = std::pow(10.0, cfg.papr_limit_db / 10.0);
    const double inv_n = 1.0 / static_cast<double>(nfft);

    ComplexVector out;
    out.reserve(n_sym * sym_len);
    for (std::size_t s = 0; s < n_sym; ++s) {
        for (auto& f : freq) f[0] = f[1] = 0.0;
        auto load = [&](std::size_t bin) {
            const cplx v = qam();
            freq[bin][0] = v.real();
            freq[bin][1] = v.imag();
        };
        for (std::size_t k = 1; k <= n_pos; ++k) load(k);
        for (std::size_t k = 1; k <= n_neg; ++k) load(nfft - k);
        fftw_execute(plan);
        for (std::size_t it = 0; limit_crest && it < cfg.cfr_iterations; ++it) {
            double power = 0.0;
            for (const auto& v : time) power += v[0] * v[0] + v[1] * v[1];
            const double limit = std::sqrt(papr_ratio * power * inv_n);
            for (auto& v : time) {
                const double a = std::hypot(v[0], v[1]);
                if (a > limit) {
                    v[0] *= limit / a;
                    v[1] *= limit / a;
                }
            }
            fftw_execute(analysis);
            for (std::size_t k = 0; k < nfft; ++k) {
                const double keep = occupied[k] ? inv_n : 0.0;
                freq[k][0] *= keep;
                freq[k][1] *= keep;
            }
            fftw_execute(plan);
        }
        for (std::size_t i = nfft - cfg.cp_len; i < nfft; ++i) out.emplace_back(time[i][0], time[i][1]);
        for (std::size_t i = 0; i < nfft; ++i) out.emplace_back(time[i][0], time[i][1]);
    }
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
        fftw_destroy_plan(analysis);
    }

    out.resize(cfg.n_samples);
    normalize_power(out);
    return out;
}

PaSimModel PaSimModel::reference() {
    PaSimModel pa;
    pa.c1 = {1.0, 0.0};
    pa.c3 = {-0.05, 0.01};
    pa.c5 = {0.002, -0.001};
    pa.c7 = {0.0, 0.0};
    pa.normalize_output = true;
    return pa;
}

cplx PaSimModel::gain(double a) const {
    const double a2 = a * a;
    return c1 + a2 * (c3 + a2 * (c5 + a2 * c7));
}

ComplexVector pa_apply(ComplexSpan x, const PaSimModel& pa) {
    ComplexVector y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) y[n] = x[n] * pa.gain(std::abs(x[n]));
    if (pa.normalize_output && !y.empty()) normalize_power(y);
    return y;
}

LeakageChannel make_leakage_channel(std::uint64_t seed, std::size_t order, double decay_db_per_tap) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    LeakageChannel ch;
    ch.seed = seed;
    ch.taps.resize(order + 1);
    double energy = 0.0;
    for (std::size_t k = 0; k <= order; ++k) {
        const double amp = std::pow(10.0, -decay_db_per_tap * static_cast<double>(k) / 20.0);
        const double re = gauss(rng);
        const double im = gauss(rng);
        ch.taps[k] = amp * cplx(re, im);
        energy += std::norm(ch.taps[k]);
    }
    if (!(energy > 0.0)) throw ConfigError("leakage channel: all taps are zero");
    const double scale = 1.0 / std::sqrt(energy);
    for (auto& t : ch.taps) t *= scale;
    return ch;
}

ComplexVector fir_filter(ComplexSpan x, const LeakageChannel& ch) {
    ComplexVector y(x.size());
    const std::size_t taps = ch.taps.size();
    for (std::size_t n = 0; n < x.size(); ++n) {
        cplx acc{};
        const std::size_t kmax = std::min(taps, n + 1);
        for (std::size_t k = 0; k < kmax; ++k) acc += ch.taps[k] * x[n - k];
        y[n] = acc;
    }
    return y;
}

ComplexVector white_noise(std::size_t n, double power, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(power / 2.0));
    ComplexVector v(n);
    for (auto& s : v) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        s = {re, im};
    }
    return v;
}

Dataset make_dataset(const WaveformConfig& wcfg, const PaSimModel& pa, const LeakageChannel& ch,
                     const NoiseConfig& noise) {
    if (pa.c1 == cplx{}) throw ConfigError("PA: c1 must be nonzero");
    Dataset ds;
    ds.x = gen_ofdm(wcfg);
    ds.d = fir_filter(pa_apply(ds.x, pa), ch);
    add_noise(ds.d, noise);

    nlohmann::json meta;
    meta["source"] = "pa";
    meta["waveform"] = to_json(wcfg);
    meta["pa"] = {{"c1", to_json(pa.c1)},
                  {"c3", to_json(pa.c3)},
                  {"c5", to_json(pa.c5)},
                  {"c7", to_json(pa.c7)},
                  {"normalize_output", pa.normalize_output}};
    meta["channel"] = {{"seed", ch.seed}, {"taps", ch.taps.size()}};
    meta["noise"] = to_json(noise);
    ds.metadata = meta.dump();
    return ds;
}

HammersteinModel make_truth_model(ComplexSpan x, std::size_t fir_taps, std::size_t basis_size,
                                  std::uint64_t channel_seed) {
    double peak = 0.0;
    for (const auto& s : x) peak = std::max(peak, std::abs(s));
    const SplineBasis basis(basis_size, 1.05 * peak);
    const PaSimModel pa = PaSimModel::reference();
    ComplexVector h(basis_size);
    for (std::size_t k = 0; k < basis_size; ++k) h[k] = pa.gain(basis.knot(k));
    LeakageChannel ch = make_leakage_channel(channel_seed, fir_taps - 1);
    return HammersteinModel(basis, std::move(h), std::move(ch.taps));
}

ComplexVector gen_amplitude_probe(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double a_max = std::sqrt(3.0);
    ComplexVector x(n);
    for (auto& s : x) {
        const double a = a_max * unit(rng);
        s = std::polar(a, 2.0 * std::numbers::pi * unit(rng));
    }
    return x;
}

namespace {

Dataset matched(ComplexVector x, const HammersteinModel& truth, const NoiseConfig& noise, nlohmann::json input) {
    Dataset ds;
    ds.x = std::move(x);
    ds.d = truth.forward(ds.x);
    add_noise(ds.d, noise);

    nlohmann::json meta;
    meta["source"] = "hammerstein";
    meta["input"] = std::move(input);
    meta["truth"] = {{"P", truth.p()}, {"M", truth.m()}, {"a_max", truth.basis().a_max()}};
    meta["noise"] = to_json(noise);
    ds.metadata = meta.dump();
    return ds;
}

}  // namespace

Dataset make_matched_dataset(ComplexVector x, const HammersteinModel& truth, const NoiseConfig& noise,
                             const std::string& input) {
    if (x.empty()) throw UsageError("make_matched_dataset: empty input");
    return matched(std::move(x), truth, noise, {{"kind", input}});
}

Dataset make_matched_dataset(const WaveformConfig& wcfg, const HammersteinModel& truth, const NoiseConfig& noise) {
    nlohmann::json input = to_json(wcfg);
    input["kind"] = "ofdm";
    return matched(gen_ofdm(wcfg), truth, noise, std::move(input));
}

std::vector<Block> block_iter(const Dataset& ds, std::size_t n_block) {
    if (n_block == 0) throw UsageError("block_iter: block length must be positive");
    if (n_block > ds.size()) throw UsageError("block_iter: block longer than dataset");
    std::vector<Block> blocks;
    blocks.reserve(ds.size() / n_block);
    for (std::size_t off = 0; off + n_block <= ds.size(); off += n_block)
        blocks.push_back({std::span(ds.x).subspan(off, n_block), std::span(ds.d).subspan(off, n_block), off});
    return blocks;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    if (ds.x.size() != ds.d.size()) throw UsageError("save_dataset: x and d lengths differ");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    os.write(kMagic, sizeof kMagic);
    write_le<std::uint32_t>(os, kVersion);
    write_le<std::uint64_t>(os, ds.x.size());
    for (const auto* seq : {&ds.x, &ds.d})
        for (const auto& s : *seq) {
            write_le<double>(os, s.real());
            write_le<double>(os, s.imag());
        }
    os << ds.metadata;
    if (!os) throw ConfigError("write failed: " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open dataset " + path.string());
    char magic[4];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw ConfigError("dataset file: bad magic in " + path.string());
    const auto version = read_le<std::uint32_t>(is);
    if (version != kVersion) throw ConfigError("dataset file: unsupported version " + std::to_string(version));
    const auto len = read_le<std::uint64_t>(is);
    Dataset ds;
    for (auto* seq : {&ds.x, &ds.d}) {
        seq->resize(len);
        for (auto& s : *seq) {
            const double re = read_le<double>(is);
            const double im = read_le<double>(is);
            s = {re, im};
        }
    }
    ds.metadata.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
    return ds;
}

}  // namespace sic
