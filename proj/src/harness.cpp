#include "sic/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sic/complexity.hpp"
#include "sic/errors.hpp"
#include "sic/loss.hpp"

namespace sic {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("config: '" + key + "' expects a nonnegative integer, got '" + v + "'");
    return std::stoull(v);
}

long parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long out = 0;
    try {
        out = std::stol(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

Method parse_method(const std::string& v) {
    if (v == "mnm") return Method::mnm;
    if (v == "cg") return Method::cg;
    if (v == "adam") return Method::adam;
    throw ConfigError("config: unknown method '" + v + "' (expected mnm, cg or adam)");
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_uint(key, trim(item)));
    if (out.empty()) throw ConfigError("config: '" + key + "' expects a comma-separated list");
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"method", [](auto& c, auto&, auto& v) { c.method = parse_method(v); }},
        {"L", [](auto& c, auto& k, auto& v) { c.cg_iterations = parse_uint(k, v); }},
        {"mu", [](auto& c, auto& k, auto& v) { c.mu = parse_double(k, v); }},
        {"gamma", [](auto& c, auto& k, auto& v) { c.gamma = parse_double(k, v); }},
        {"lambda", [](auto& c, auto& k, auto& v) { c.lambda = parse_double(k, v); }},
        {"adam_beta1", [](auto& c, auto& k, auto& v) { c.adam.beta1 = parse_double(k, v); }},
        {"adam_beta2", [](auto& c, auto& k, auto& v) { c.adam.beta2 = parse_double(k, v); }},
        {"adam_eps", [](auto& c, auto& k, auto& v) { c.adam.eps = parse_double(k, v); }},
        {"adam_mu0", [](auto& c, auto& k, auto& v) { c.adam.mu0 = parse_double(k, v); }},
        {"adam_alpha_start", [](auto& c, auto& k, auto& v) { c.adam.alpha_start = parse_double(k, v); }},
        {"adam_alpha_end", [](auto& c, auto& k, auto& v) { c.adam.alpha_end = parse_double(k, v); }},
        {"M", [](auto& c, auto& k, auto& v) { c.fir_taps = parse_uint(k, v); }},
        {"P", [](auto& c, auto& k, auto& v) { c.basis_size = parse_uint(k, v); }},
        {"N", [](auto& c, auto& k, auto& v) { c.block_length = parse_uint(k, v); }},
        {"epochs", [](auto& c, auto& k, auto& v) { c.epochs = parse_uint(k, v); }},
        {"dataset", [](auto& c, auto&, auto& v) { c.dataset_path = v; }},
        {"source",
         [](auto& c, auto&, auto& v) {
             if (v != "pa" && v != "hammerstein") throw ConfigError("config: source must be 'pa' or 'hammerstein'");
             c.source = v;
         }},
        {"input",
         [](auto& c, auto&, auto& v) {
             if (v != "ofdm" && v != "probe") throw ConfigError("config: input must be 'ofdm' or 'probe'");
             c.input = v;
         }},
        {"n_samples", [](auto& c, auto& k, auto& v) { c.waveform.n_samples = parse_uint(k, v); }},
        {"bandwidth_hz", [](auto& c, auto& k, auto& v) { c.waveform.bandwidth_hz = parse_double(k, v); }},
        {"sample_rate_hz", [](auto& c, auto& k, auto& v) { c.waveform.sample_rate_hz = parse_double(k, v); }},
        {"qam_order", [](auto& c, auto& k, auto& v) { c.waveform.qam_order = static_cast<unsigned>(parse_uint(k, v)); }},
        {"fft_size", [](auto& c, auto& k, auto& v) { c.waveform.fft_size = parse_uint(k, v); }},
        {"cp_len", [](auto& c, auto& k, auto& v) { c.waveform.cp_len = parse_uint(k, v); }},
        {"papr_limit_db", [](auto& c, auto& k, auto& v) { c.waveform.papr_limit_db = parse_double(k, v); }},
        {"cfr_iterations", [](auto& c, auto& k, auto& v) { c.waveform.cfr_iterations = parse_uint(k, v); }},
        {"seed", [](auto& c, auto& k, auto& v) { c.set_seed(parse_uint(k, v)); }},
        {"noise", [](auto& c, auto& k, auto& v) { c.noise.enabled = parse_bool(k, v); }},
        {"noise_db", [](auto& c, auto& k, auto& v) { c.noise.level_db = parse_double(k, v); }},
        {"nmse_eval_stride", [](auto& c, auto& k, auto& v) { c.nmse_eval_stride = parse_uint(k, v); }},
        {"target_db", [](auto& c, auto& k, auto& v) { c.target_db = parse_double(k, v); }},
        {"stop_at_target", [](auto& c, auto& k, auto& v) { c.stop_at_target = parse_bool(k, v); }},
        {"input_delay", [](auto& c, auto& k, auto& v) { c.input_delay = parse_int(k, v); }},
        {"compare_L", [](auto& c, auto& k, auto& v) { c.compare_L = parse_list(k, v); }},
    };
    return table;
}

std::string join(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

ComplexVector delayed(const ComplexVector& x, std::size_t delay) {
    ComplexVector out(x.size());
    for (std::size_t n = delay; n < x.size(); ++n) out[n] = x[n - delay];
    return out;
}

std::size_t resolve_delay(const ExperimentConfig& cfg, const Dataset& ds) {
    if (cfg.input_delay >= 0) return static_cast<std::size_t>(cfg.input_delay);
    std::string source = cfg.source;
    if (!ds.metadata.empty()) {
        const auto meta = nlohmann::json::parse(ds.metadata, nullptr, false);
        if (meta.is_object() && meta.contains("source") && meta["source"].is_string())
            source = meta["source"].get<std::string>();
    }
    return source == "pa" ? (cfg.fir_taps - 1) / 2 : 0;
}

std::uint64_t cost_per_update(const ExperimentConfig& cfg, std::uint64_t k) {
    const CostModel cm{k, cfg.block_length};
    switch (cfg.method) {
        case Method::mnm: return cost_mnm(cm);
        case Method::cg: return cost_cg(cm, cfg.cg_iterations);
        case Method::adam: return cost_grad(cm);
    }
    return 0;
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::mnm: return "mnm";
        case Method::cg: return "cg";
        case Method::adam: return "adam";
    }
    return "?";
}

void ExperimentConfig::set_seed(std::uint64_t s) {
    seed = s;
    waveform.seed = s;
    noise.seed = s + 2;
}

void ExperimentConfig::validate() const {
    if (fir_taps == 0 || fir_taps % 2 == 0) throw ConfigError("config: M must be odd (M = 2D + 1)");
    if (basis_size < 2) throw ConfigError("config: P must be at least 2");
    if (block_length == 0) throw ConfigError("config: N must be positive");
    if (epochs == 0) throw ConfigError("config: epochs must be positive");
    if (cg_iterations == 0) throw ConfigError("config: L must be at least 1");
    if (!(mu > 0.0)) throw ConfigError("config: mu must be positive");
    if (gamma < 0.0) throw ConfigError("config: gamma must be nonnegative");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("config: lambda must lie in [0, 1]");
    if (adam.beta1 < 0.0 || adam.beta1 >= 1.0 || adam.beta2 < 0.0 || adam.beta2 >= 1.0)
        throw ConfigError("config: Adam betas must lie in [0, 1)");
    if (!(adam.eps > 0.0)) throw ConfigError("config: adam_eps must be positive");
    if (nmse_eval_stride == 0) throw ConfigError("config: nmse_eval_stride must be positive");
    for (auto l : compare_L)
        if (l == 0) throw ConfigError("config: compare_L entries must be at least 1");
    if (input == "probe" && source != "hammerstein")
        throw ConfigError("config: input = probe requires source = hammerstein");
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(base, key, value);
    }
    base.validate();
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string format_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "method = " << method_name(c.method) << '\n'
       << "L = " << c.cg_iterations << '\n'
       << "mu = " << fmt_double(c.mu) << '\n'
       << "gamma = " << fmt_double(c.gamma) << '\n'
       << "lambda = " << fmt_double(c.lambda) << '\n'
       << "adam_beta1 = " << fmt_double(c.adam.beta1) << '\n'
       << "adam_beta2 = " << fmt_double(c.adam.beta2) << '\n'
       << "adam_eps = " << fmt_double(c.adam.eps) << '\n'
       << "adam_mu0 = " << fmt_double(c.adam.mu0) << '\n'
       << "adam_alpha_start = " << fmt_double(c.adam.alpha_start) << '\n'
       << "adam_alpha_end = " << fmt_double(c.adam.alpha_end) << '\n'
       << "M = " << c.fir_taps << '\n'
       << "P = " << c.basis_size << '\n'
       << "N = " << c.block_length << '\n'
       << "epochs = " << c.epochs << '\n';
    if (!c.dataset_path.empty()) os << "dataset = " << c.dataset_path << '\n';
    os << "source = " << c.source << '\n'
       << "input = " << c.input << '\n'
       << "n_samples = " << c.waveform.n_samples << '\n'
       << "bandwidth_hz = " << fmt_double(c.waveform.bandwidth_hz) << '\n'
       << "sample_rate_hz = " << fmt_double(c.waveform.sample_rate_hz) << '\n'
       << "qam_order = " << c.waveform.qam_order << '\n'
       << "fft_size = " << c.waveform.fft_size << '\n'
       << "cp_len = " << c.waveform.cp_len << '\n'
       << "papr_limit_db = " << fmt_double(c.waveform.papr_limit_db) << '\n'
       << "cfr_iterations = " << c.waveform.cfr_iterations << '\n'
       << "seed = " << c.seed << '\n'
       << "noise = " << (c.noise.enabled ? "true" : "false") << '\n'
       << "noise_db = " << fmt_double(c.noise.level_db) << '\n'
       << "nmse_eval_stride = " << c.nmse_eval_stride << '\n'
       << "target_db = " << fmt_double(c.target_db) << '\n'
       << "stop_at_target = " << (c.stop_at_target ? "true" : "false") << '\n'
       << "input_delay = " << c.input_delay << '\n'
       << "compare_L = " << join(c.compare_L) << '\n';
    return os.str();
}

Dataset prepare_dataset(const ExperimentConfig& cfg) {
    if (!cfg.dataset_path.empty()) return load_dataset(cfg.dataset_path);
    if (cfg.source == "hammerstein") {
        ComplexVector x = cfg.input == "probe" ? gen_amplitude_probe(cfg.waveform.n_samples, cfg.waveform.seed)
                                               : gen_ofdm(cfg.waveform);
        const HammersteinModel truth = make_truth_model(x, cfg.fir_taps, cfg.basis_size, cfg.seed + 1);
        if (cfg.input == "probe") return make_matched_dataset(std::move(x), truth, cfg.noise, "probe");
        return make_matched_dataset(cfg.waveform, truth, cfg.noise);
    }
    return make_dataset(cfg.waveform, PaSimModel::reference(), make_leakage_channel(cfg.seed + 1), cfg.noise);
}

std::string method_label(const ExperimentConfig& cfg) {
    switch (cfg.method) {
        case Method::mnm: return "MNM";
        case Method::cg: return "CG L=" + std::to_string(cfg.cg_iterations);
        case Method::adam: return "BGD Adam";
    }
    return "?";
}

std::uint64_t planned_updates(const ExperimentConfig& cfg, std::size_t signal_length) {
    if (cfg.block_length == 0) throw ConfigError("config: N must be positive");
    return static_cast<std::uint64_t>(cfg.epochs) * (signal_length / cfg.block_length);
}

namespace {

ExperimentResult run_impl(const ExperimentConfig& cfg, const Dataset& ds, bool keep_partial) {
    cfg.validate();
    if (ds.x.size() != ds.d.size() || ds.x.empty()) throw ConfigError("dataset: x and d must be nonempty and equal length");
    if (ds.size() < cfg.fir_taps) throw ConfigError("dataset: shorter than the FIR length");

    const ComplexVector x_in = delayed(ds.x, resolve_delay(cfg, ds));
    double peak = 0.0;
    for (const auto& s : x_in) peak = std::max(peak, std::abs(s));
    if (!(peak > 0.0)) throw ConfigError("dataset: transmit signal is identically zero");

    HammersteinModel model(SplineBasis(cfg.basis_size, 1.05 * peak), cfg.fir_taps);
    const PreparedSignal sig = model.prepare(x_in);
    const std::vector<Block> blocks = block_iter(ds, cfg.block_length);
    const std::size_t n = cfg.block_length;
    const std::size_t p = cfg.basis_size;
    const std::size_t k = model.num_params();

    ExperimentResult res{{}, {}, model, 0, cost_per_update(cfg, k), {}};
    res.updates = planned_updates(cfg, ds.size());
    res.curve.stride = cfg.nmse_eval_stride;

    AdamConfig adam = cfg.adam;
    adam.total_steps = res.updates;
    AdamState adam_state;
    EmaState ema;
    ema.lambda = cfg.lambda;
    const CgConfig cg{cfg.cg_iterations, cfg.mu, cfg.gamma, 1e-14};

    ParamVector z = model.params();
    const double signal_len = static_cast<double>(ds.size());
    std::uint64_t cum_cost = 0;

    try {
        for (std::uint64_t t = 0; t < res.updates; ++t) {
            const Block& blk = blocks[t % blocks.size()];
            const ComplexMatrix jac = model.jacobian(sig, blk.offset, n);

            ComplexVector e(n);
            const auto& w = model.w();
            for (std::size_t i = 0; i < n; ++i) {
                const auto row = jac.row(i);
                cplx y{};
                for (std::size_t j = 0; j < w.size(); ++j) y += row[p + j] * w[j];
                e[i] = blk.d[i] - y;
            }

            try {
                switch (cfg.method) {
                    case Method::mnm: {
                        const QuadraticModel q = build_quadratic(jac, e);
                        ema = ema_update(std::move(ema), q.M, q.b);
                        z = mnm_step(z, ema.as_quadratic(), cfg.mu, cfg.gamma);
                        break;
                    }
                    case Method::cg: {
                        const QuadraticModel q = build_quadratic(jac, e);
                        ema = ema_update(std::move(ema), q.M, q.b);
                        z = cg_step(z, ema.as_quadratic(), cg).z;
                        break;
                    }
                    case Method::adam: {
                        z = adam_step(z, wirtinger_gradient(jac, e), adam_state, adam, t);
                        break;
                    }
                }
            } catch (const SingularMatrixError& e) {
                throw NumericalAbort(method_label(cfg) + ": update " + std::to_string(t + 1) + ": " + e.what(), t + 1);
            }
            if (!all_finite(z.values()))
                throw NumericalAbort(method_label(cfg) + ": non-finite parameters after update " + std::to_string(t + 1),
                                     t + 1);
            model.set_params(z);
            cum_cost += res.cost_per_update;

            const std::uint64_t update = t + 1;
            if (update % cfg.nmse_eval_stride == 0 || update == res.updates) {
                const ComplexVector y = model.forward(sig);
                ComplexVector resid(ds.size());
                for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = ds.d[i] - y[i];
                const double nmse = nmse_db(ds.d, resid);
                if (!std::isfinite(nmse))
                    throw NumericalAbort(method_label(cfg) + ": non-finite NMSE after update " + std::to_string(update),
                                         update);
                res.curve.points.push_back(
                    {update, static_cast<double>(update) * static_cast<double>(n) / signal_len, nmse, cum_cost});
                if (cfg.stop_at_target && nmse <= cfg.target_db) {
                    res.updates = update;
                    break;
                }
            }
        }
    } catch (const NumericalAbort& e) {
        if (!keep_partial) throw;
        res.updates = e.update - 1;
        res.abort_reason = e.what();
        res.summary.aborted_at = e.update;
    }

    res.model = model;
    res.summary.label = method_label(cfg);
    res.summary.epochs_to_target = epochs_to_target(res.curve, cfg.target_db);
    res.summary.relative_complexity = relative_cost(res.cost_per_update, CostModel{k, n});
    res.summary.final_nmse_db = res.curve.points.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                         : res.curve.points.back().nmse_db;
    return res;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& ds) { return run_impl(cfg, ds, false); }

std::vector<ExperimentResult> run_comparison(const ExperimentConfig& cfg, const Dataset& ds) {
    std::vector<ExperimentConfig> runs;
    ExperimentConfig c = cfg;
    c.method = Method::mnm;
    runs.push_back(c);
    for (auto l : cfg.compare_L) {
        c.method = Method::cg;
        c.cg_iterations = l;
        runs.push_back(c);
    }
    c.method = Method::adam;
    c.cg_iterations = cfg.cg_iterations;
    runs.push_back(c);

    std::vector<std::future<ExperimentResult>> futures;
    for (const auto& rc : runs)
        futures.push_back(std::async(std::launch::async, [&ds, rc] { return run_impl(rc, ds, true); }));
    std::vector<ExperimentResult> out;
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

double epochs_to_target(const LearningCurve& curve, double target_db) {
    for (const auto& pt : curve.points)
        if (pt.nmse_db <= target_db) return pt.epoch;
    return std::numeric_limits<double>::infinity();
}

SummaryTable summary_table(const std::vector<SummaryRow>& rows) {
    if (rows.empty()) throw UsageError("summary_table: no rows");
    SummaryTable out;
    std::ostringstream txt, csv;
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %18s %14s %14s\n", "method", "epochs_to_target", "rel_complexity",
                  "final_nmse_db");
    txt << line;
    csv << "method,epochs_to_target,relative_complexity,final_nmse_db,aborted_at\n";
    for (const auto& r : rows) {
        char epochs[32];
        if (std::isfinite(r.epochs_to_target))
            std::snprintf(epochs, sizeof epochs, "%.2f", r.epochs_to_target);
        else
            std::snprintf(epochs, sizeof epochs, "not reached");
        char rel[32];
        if (r.relative_complexity < 0.1)
            std::snprintf(rel, sizeof rel, "%.2e", r.relative_complexity);
        else
            std::snprintf(rel, sizeof rel, "%.2f", r.relative_complexity);
        char final_db[32];
        if (r.aborted_at > 0)
            std::snprintf(final_db, sizeof final_db, "aborted@%llu", static_cast<unsigned long long>(r.aborted_at));
        else
            std::snprintf(final_db, sizeof final_db, "%.1f", r.final_nmse_db);
        std::snprintf(line, sizeof line, "%-12s %18s %14s %14s\n", r.label.c_str(), epochs, rel, final_db);
        txt << line;
        csv << r.label << ',' << (std::isfinite(r.epochs_to_target) ? fmt_double(r.epochs_to_target) : "inf") << ','
            << fmt_double(r.relative_complexity) << ',' << fmt_double(r.final_nmse_db) << ',' << r.aborted_at << '\n';
    }
    out.text = txt.str();
    out.csv = csv.str();
    return out;
}

std::string curve_csv(const LearningCurve& curve) {
    std::ostringstream os;
    os << "update,epoch,nmse_db,cum_cost\n";
    for (const auto& pt : curve.points)
        os << pt.update << ',' << fmt_double(pt.epoch) << ',' << fmt_double(pt.nmse_db) << ',' << pt.cum_cost << '\n';
    return os.str();
}

LearningCurve parse_curve_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line) || trim(line) != "update,epoch,nmse_db,cum_cost")
        throw ConfigError("curve csv: missing header");
    LearningCurve curve;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string f[4];
        for (auto& s : f)
            if (!std::getline(ss, s, ',')) throw ConfigError("curve csv: short row");
        curve.points.push_back({parse_uint("update", f[0]), parse_double("epoch", f[1]),
                                parse_double("nmse_db", f[2]), parse_uint("cum_cost", trim(f[3]))});
    }
    return curve;
}

}  // namespace sic
