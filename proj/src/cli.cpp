#include "canamrf/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "canamrf/config.hpp"
#include "canamrf/errors.hpp"
#include "canamrf/format.hpp"
#include "canamrf/grad_check.hpp"
#include "canamrf/ops.hpp"

namespace canamrf::cli {

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void echo(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& entries) {
    for (const auto& [key, value] : entries) out << "config " << key << "=" << value << '\n';
}

void print_metrics(std::ostream& out, const Metrics& m) {
    out << "precision=" << fixed2(m.precision) << " recall=" << fixed2(m.recall) << " f1=" << fixed2(m.f1) << '\n';
    out << "tp=" << m.tp << " fp=" << m.fp << " fn=" << m.fn << " tn=" << m.tn << '\n';
}

struct GenDataArgs {
    std::string spec;
    std::string out;
    std::optional<std::uint64_t> seed;
};

int gen_data(const GenDataArgs& a, std::ostream& out) {
    SynthSpec spec = load_synth_spec(a.spec);
    if (a.seed) spec.seed = *a.seed;
    echo(out, synth_spec_entries(spec));
    const Dataset ds = generate(spec);
    write_dataset(ds, std::filesystem::path(a.out));
    out << "samples=" << ds.size() << " positives=" << ds.positives() << " negatives=" << ds.size() - ds.positives()
        << '\n';
    return kSuccess;
}

struct TrainArgs {
    std::string data;
    std::string config;
    std::string out_model;
    std::string history;
    std::optional<std::uint64_t> seed;
};

int train_cmd(const TrainArgs& a, std::ostream& out) {
    RunConfig cfg = a.config.empty() ? RunConfig{} : load_run_config(a.config);
    if (a.seed) cfg.train.seed = *a.seed;
    const Dataset ds = load_dataset(std::filesystem::path(a.data));
    if (!a.config.empty()) {
        // Explicit model.dims.* must agree with the data; otherwise take them from the manifest.
        const auto entries = read_key_values(a.config);
        for (Modality m : kModalities) {
            const std::string key = "model.dims." + std::string(to_string(m));
            for (const KeyValue& kv : entries) {
                if (kv.key == key && cfg.model.dims[m] != ds.dims[m]) {
                    throw ConfigError(a.config + ":" + std::to_string(kv.line) + ": " + key + " = " + kv.value +
                                      " but the dataset has width " + std::to_string(ds.dims[m]));
                }
            }
        }
    }
    cfg.model.dims = ds.dims;
    cfg.model.validate();
    echo(out, model_config_entries(cfg.model));
    echo(out, train_config_entries(cfg.train));

    const std::string history_path = a.history.empty() ? a.out_model + ".history" : a.history;
    std::ofstream history(history_path);
    if (!history) throw ParseError("cannot open '" + history_path + "' for writing");
    const TrainResult result = fit(ds, cfg.model, cfg.train, [&](const EpochRecord& rec) {
        const std::string line = format_epoch_record(rec);
        history << line << '\n';
        out << line << '\n';
    });
    save_checkpoint(result.params, std::filesystem::path(a.out_model));
    out << "best_epoch=" << result.best_epoch << " epochs_run=" << result.history.size() << '\n';
    print_metrics(out, result.history[result.best_epoch - 1].validation);
    return kSuccess;
}

struct EvalArgs {
    std::string data;
    std::string model;
    double threshold = 0.5;
};

int eval_cmd(const EvalArgs& a, std::ostream& out) {
    if (!(a.threshold > 0.0 && a.threshold < 1.0)) throw ConfigError("--threshold must lie in (0, 1)");
    const Dataset ds = load_dataset(std::filesystem::path(a.data));
    const ModelParams params = load_checkpoint(std::filesystem::path(a.model));
    if (!(params.config.dims == ds.dims)) throw ConfigError("dataset widths do not match the checkpoint's model");
    print_metrics(out, evaluate(params, ds, a.threshold));
    return kSuccess;
}

struct GradCheckArgs {
    std::string config;
    std::uint64_t seed = 7;
};

int grad_check_cmd(const GradCheckArgs& a, std::ostream& out) {
    const RunConfig cfg = a.config.empty() ? RunConfig{} : load_run_config(a.config);
    echo(out, model_config_entries(cfg.model));
    out << "config seed=" << a.seed << '\n';

    SynthSpec spec;
    spec.dims = cfg.model.dims;
    spec.seed = mix_seed(a.seed, 1);
    const Sample sample = generate_sample(spec, 0);
    ModelParams params = ModelParams::init(cfg.model, mix_seed(a.seed, 0));

    const auto start = std::chrono::steady_clock::now();
    const GradCheckReport report = grad_check(
        [&](Tape& tape, ParamStore&) { return sample_loss(tape, sample, params); }, params.store, 1e-4);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    out << "max_rel_error=" << format_double(report.max_rel_error) << " worst=" << report.worst_path << "["
        << report.worst_index << "] entries=" << report.entries_checked << " seconds=" << format_double(seconds)
        << '\n';
    return report.max_rel_error < kGradCheckTolerance ? kSuccess : kNumericalFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multimodal recurrent-fusion classifier: data generation, training, evaluation"};
    app.name("canamrf");
    app.require_subcommand(1);

    GenDataArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic multimodal dataset");
    gen_cmd->add_option("--spec", gen.spec, "Synthetic spec file (synth.* keys)")->required()->check(CLI::ExistingFile);
    gen_cmd->add_option("--out", gen.out, "Output .mmjl path")->required();
    gen_cmd->add_option("--seed", gen.seed, "Overrides synth.seed");

    TrainArgs tr;
    auto* train_sub = app.add_subcommand("train", "Train a model on a dataset");
    train_sub->add_option("--data", tr.data, "Dataset (.mmjl)")->required()->check(CLI::ExistingFile);
    train_sub->add_option("--config", tr.config, "Config file (model.*, amrf.*, train.* keys)")
        ->check(CLI::ExistingFile);
    train_sub->add_option("--out-model", tr.out_model, "Checkpoint output path")->required();
    train_sub->add_option("--history", tr.history, "History output path (default <out-model>.history)");
    train_sub->add_option("--seed", tr.seed, "Overrides train.seed");

    EvalArgs ev;
    auto* eval_sub = app.add_subcommand("eval", "Score a checkpoint on a dataset");
    eval_sub->add_option("--data", ev.data, "Dataset (.mmjl)")->required()->check(CLI::ExistingFile);
    eval_sub->add_option("--model", ev.model, "Checkpoint")->required()->check(CLI::ExistingFile);
    eval_sub->add_option("--threshold", ev.threshold, "Decision threshold")->capture_default_str();

    GradCheckArgs gc;
    auto* gc_sub = app.add_subcommand("grad-check", "Compare analytic and finite-difference gradients");
    gc_sub->add_option("--config", gc.config, "Config file (model.* keys)")->check(CLI::ExistingFile);
    gc_sub->add_option("--seed", gc.seed, "Seed for parameters and the probe sample")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    }

    try {
        if (gen_cmd->parsed()) return gen_data(gen, out);
        if (train_sub->parsed()) return train_cmd(tr, out);
        if (eval_sub->parsed()) return eval_cmd(ev, out);
        if (gc_sub->parsed()) return grad_check_cmd(gc, out);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    err << app.help();
    return kUsageError;
}

}  // namespace canamrf::cli
