#include "sic/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sic/complexity.hpp"
#include "sic/errors.hpp"
#include "sic/harness.hpp"

namespace fs = std::filesystem;

namespace sic {

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* sub, CommonOptions& o) {
    sub->add_option("--config", o.config, "Experiment config (key = value lines)");
    sub->add_option("--seed", o.seed, "Override the config seed");
    sub->add_option("--out", o.out, "Output directory (default: $SIC_OUT_DIR or .)");
}

ExperimentConfig resolve_config(const CommonOptions& o) {
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (o.seed) cfg.set_seed(*o.seed);
    return cfg;
}

fs::path resolve_out(const CommonOptions& o) {
    fs::path out = o.out;
    if (out.empty()) {
        const char* env = std::getenv("SIC_OUT_DIR");
        out = env ? env : ".";
    }
    fs::create_directories(out);
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << text;
}

std::string curve_file_name(const ExperimentConfig& cfg) {
    switch (cfg.method) {
        case Method::mnm: return "curve_mnm.csv";
        case Method::cg: return "curve_cg_L" + std::to_string(cfg.cg_iterations) + ".csv";
        case Method::adam: return "curve_adam.csv";
    }
    return "curve.csv";
}

std::string run_meta(const ExperimentConfig& cfg, const Dataset& ds, const std::vector<ExperimentResult>& results) {
    nlohmann::json meta;
    meta["config"] = format_config(cfg);
    meta["dataset"] = nlohmann::json::parse(ds.metadata.empty() ? "{}" : ds.metadata, nullptr, false);
    meta["samples"] = ds.size();
    meta["nmse_eval_stride"] = cfg.nmse_eval_stride;
    meta["nmse_scope"] = "full training sequence";
    for (const auto& r : results)
        meta["runs"].push_back({{"label", r.summary.label},
                                {"updates", r.updates},
                                {"cost_per_update", r.cost_per_update},
                                {"aborted_at", r.summary.aborted_at},
                                {"abort_reason", r.abort_reason}});
    return meta.dump(2) + "\n";
}

int cmd_gen_data(const CommonOptions& o) {
    const ExperimentConfig cfg = resolve_config(o);
    const fs::path out = resolve_out(o);
    const Dataset ds = prepare_dataset(cfg);
    save_dataset(ds, out / "dataset.sicd");
    std::cout << "wrote " << (out / "dataset.sicd").string() << " (" << ds.size() << " samples)\n";
    return 0;
}

int cmd_train(const CommonOptions& o, const std::string& dataset, const std::string& method) {
    ExperimentConfig cfg = resolve_config(o);
    if (!dataset.empty()) cfg.dataset_path = dataset;
    if (!method.empty()) cfg = parse_config("method = " + method, cfg);
    const fs::path out = resolve_out(o);
    const Dataset ds = prepare_dataset(cfg);
    const ExperimentResult res = run_experiment(cfg, ds);

    const SummaryTable table = summary_table({res.summary});
    write_file(out / "curve.csv", curve_csv(res.curve));
    write_file(out / "summary.txt", table.text);
    write_file(out / "summary.csv", table.csv);
    std::ostringstream model_text;
    res.model.save(model_text);
    write_file(out / "model.txt", model_text.str());
    write_file(out / "run_meta.json", run_meta(cfg, ds, {res}));
    std::cout << table.text;
    return 0;
}

int cmd_compare(const CommonOptions& o, const std::string& dataset) {
    ExperimentConfig cfg = resolve_config(o);
    if (!dataset.empty()) cfg.dataset_path = dataset;
    const fs::path out = resolve_out(o);
    const Dataset ds = prepare_dataset(cfg);
    const std::vector<ExperimentResult> results = run_comparison(cfg, ds);

    std::vector<SummaryRow> rows;
    ExperimentConfig labelled = cfg;
    std::size_t cg_index = 0;
    for (const auto& r : results) {
        rows.push_back(r.summary);
        if (r.summary.label == "MNM") {
            labelled.method = Method::mnm;
        } else if (r.summary.label == "BGD Adam") {
            labelled.method = Method::adam;
        } else {
            labelled.method = Method::cg;
            labelled.cg_iterations = cfg.compare_L[cg_index++];
        }
        write_file(out / curve_file_name(labelled), curve_csv(r.curve));
    }
    const SummaryTable table = summary_table(rows);
    write_file(out / "compare.txt", table.text);
    write_file(out / "compare.csv", table.csv);
    write_file(out / "run_meta.json", run_meta(cfg, ds, results));
    std::cout << table.text;
    bool aborted = false;
    for (const auto& r : results)
        if (r.summary.aborted_at > 0) {
            std::cerr << "numerical abort: " << r.abort_reason << '\n';
            aborted = true;
        }
    return aborted ? 3 : 0;
}

int cmd_complexity(std::uint64_t k, std::uint64_t n, const std::vector<std::uint64_t>& ls) {
    const CostModel cm{k, n};
    char line[96];
    auto row = [&](const std::string& label, std::uint64_t cost, const char* ratio_fmt) {
        std::snprintf(line, sizeof line, "%-10s %14llu ", label.c_str(), static_cast<unsigned long long>(cost));
        std::cout << line;
        std::snprintf(line, sizeof line, ratio_fmt, relative_cost(cost, cm));
        std::cout << line << '\n';
    };
    std::snprintf(line, sizeof line, "%-10s %14s %12s\n", "method", "cost", "relative");
    std::cout << line;
    row("MNM", cost_mnm(cm), "%12.2f");
    for (auto l : ls) row("CG L=" + std::to_string(l), cost_cg(cm, l), "%12.2f");
    row("Grad", cost_grad(cm), "%12.2e");
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Spline-Hammerstein self-interference canceller: data generation, training, comparison"};
    app.require_subcommand(1);

    CommonOptions gen_opts, train_opts, cmp_opts;
    std::string train_dataset, train_method, cmp_dataset;

    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset file");
    add_common(gen, gen_opts);

    auto* train = app.add_subcommand("train", "Run one experiment; write curve CSV and summary");
    add_common(train, train_opts);
    train->add_option("--dataset", train_dataset, "Dataset file (overrides config)");
    train->add_option("--method", train_method, "mnm | cg | adam (overrides config)");

    auto* cmp = app.add_subcommand("compare", "Run MNM, CG(L) sweep and Adam; write combined table");
    add_common(cmp, cmp_opts);
    cmp->add_option("--dataset", cmp_dataset, "Dataset file (overrides config)");

    std::uint64_t ck = 59, cn = 60;
    std::vector<std::uint64_t> cl{50, 30, 20, 10, 5, 1};
    auto* cx = app.add_subcommand("complexity-table", "Print per-update cost ratios");
    cx->add_option("--K", ck, "Parameter count")->check(CLI::PositiveNumber);
    cx->add_option("--N", cn, "Block length")->check(CLI::PositiveNumber);
    cx->add_option("--L", cl, "CG iteration counts")->delimiter(',')->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*gen) return cmd_gen_data(gen_opts);
        if (*train) return cmd_train(train_opts, train_dataset, train_method);
        if (*cmp) return cmd_compare(cmp_opts, cmp_dataset);
        if (*cx) return cmd_complexity(ck, cn, cl);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SingularMatrixError& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace sic
