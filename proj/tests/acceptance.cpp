// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "canamrf/amrf.hpp"
#include "canamrf/attention.hpp"
#include "canamrf/cli.hpp"
#include "canamrf/data.hpp"
#include "canamrf/format.hpp"
#include "canamrf/metrics.hpp"
#include "canamrf/model.hpp"
#include "canamrf/ops.hpp"
#include "canamrf/trainer.hpp"
#include "oracles.hpp"

using namespace canamrf;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "canamrf_acceptance";
    fs::create_directories(dir);
    return dir;
}

std::string field(const std::string& text, const std::string& key) {
    const auto at = text.find(key + "=");
    if (at == std::string::npos) return {};
    const auto start = at + key.size() + 1;
    return text.substr(start, text.find_first_of(" \n", start) - start);
}

Outcome gradient_fidelity() {
    const fs::path dir = scratch_dir();
    bool ok = true;
    std::string detail;
    for (MixVariant v : {MixVariant::MatrixLiteral, MixVariant::ScalarElementwise, MixVariant::CorrSelf,
                         MixVariant::CorrCross}) {
        const fs::path cfg = dir / ("grad_" + std::string(to_string(v)) + ".cfg");
        std::ofstream(cfg) << "model.d = 8\nmodel.k = 4\namrf.variant = " << to_string(v) << '\n';
        std::ostringstream out, err;
        const auto t0 = Clock::now();
        const int code = cli::run({"grad-check", "--config", cfg.string(), "--seed", "7"}, out, err);
        const double secs = seconds_since(t0);
        const double rel = code == cli::kSuccess || code == cli::kNumericalFailure
                               ? parse_double(field(out.str(), "max_rel_error"), "max_rel_error")
                               : INFINITY;
        const bool pass = code == cli::kSuccess && rel < 1e-4 && secs < 30.0;
        ok = ok && pass;
        detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(v)) + " err=" + fmt("%.2e", rel) +
                  " t=" + fmt("%.1fs", secs) + (pass ? "" : " (exit " + std::to_string(code) + ")");
    }
    return {ok, detail};
}

Outcome circulant_oracle() {
    std::mt19937_64 rng(2);
    double worst = 0.0;
    bool recur_exact = true;
    std::size_t checked = 0;
    for (std::size_t d = 1; d <= 16; ++d) {
        for (int trial = 0; trial < 100; ++trial) {
            const Tensor2 v = oracle::random_tensor(1, d, rng, -3.0, 3.0);
            const std::vector<double> vv(v.data().begin(), v.data().end());
            Tape tape;
            Var x = tape.constant(v);
            worst = std::max(worst, oracle::max_abs_diff(mix(x, x, MixVariant::MatrixLiteral).value(),
                                                         oracle::to_tensor(oracle::mix_matrix_literal(vv))));
            worst = std::max(worst, oracle::max_abs_diff(mix(x, x, MixVariant::ScalarElementwise).value(),
                                                         Tensor2::row(oracle::mix_scalar_elementwise(vv))));
            const Tensor2 a = recur(v);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) recur_exact = recur_exact && a(i, j) == v[(i + j) % d];
            ++checked;
        }
    }
    return {worst < 1e-12 && recur_exact, std::to_string(checked) + " vectors, max |mix - double sum| = " +
                                              fmt("%.2e", worst) + ", recur exact: " + (recur_exact ? "yes" : "no")};
}

Outcome attention_algebra() {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    std::uniform_real_distribution<double> shift(-20.0, 20.0);
    double stoch = 0.0, shifted = 0.0, outside = 0.0;
    bool nonneg = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = dim(rng), m = n, c = dim(rng);
        const Tensor2 q = oracle::random_tensor(n, c, rng, -3, 3);
        const Tensor2 k = oracle::random_tensor(m, c, rng, -3, 3);
        const Tensor2 v = oracle::random_tensor(m, c, rng, -3, 3);
        const Tensor2 w = attention_weights(q, k);
        for (std::size_t i = 0; i < n; ++i) {
            double total = 0.0;
            for (double x : w.row_span(i)) {
                nonneg = nonneg && x >= 0.0;
                total += x;
            }
            stoch = std::max(stoch, std::abs(total - 1.0));
        }
        Tape tape;
        const Tensor2 out = cross_modal_attention(tape.constant(q), tape.constant(k), tape.constant(v)).value();
        for (std::size_t j = 0; j < c; ++j) {
            double lo = INFINITY, hi = -INFINITY;
            for (std::size_t r = 0; r < m; ++r) {
                lo = std::min(lo, v(r, j));
                hi = std::max(hi, v(r, j));
            }
            for (std::size_t i = 0; i < n; ++i) outside = std::max({outside, lo - out(i, j), out(i, j) - hi});
        }
        // Adding a per-row constant to the logits leaves the output unchanged.
        Tensor2 logits = scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(c)));
        for (std::size_t i = 0; i < n; ++i) {
            const double s = shift(rng);
            for (std::size_t j = 0; j < m; ++j) logits(i, j) += s;
        }
        shifted = std::max(shifted, oracle::max_abs_diff(matmul(softmax_rows(logits), v), out));
    }
    const bool pass = nonneg && stoch < 1e-12 && outside <= 1e-12 && shifted < 1e-12;
    return {pass, "1000 instances, |row sum - 1| <= " + fmt("%.1e", stoch) + ", hull excess " + fmt("%.1e", outside) +
                      ", shift diff " + fmt("%.1e", shifted)};
}

Outcome focal_limits() {
    double bce_gap = 0.0;
    bool decreasing = true;
    for (double gamma : {0.0, 0.5, 2.0, 5.0}) {
        double prev = INFINITY;
        for (int i = 1; i <= 1000; ++i) {
            const double p = static_cast<double>(i) / 1001.0;
            if (gamma == 0.0) {
                bce_gap = std::max(bce_gap, std::abs(focal_loss(p, 1, 0.0) + std::log(p)));
                bce_gap = std::max(bce_gap, std::abs(focal_loss(p, 0, 0.0) + std::log1p(-p)));
            }
            const double l = focal_loss(p, 1, gamma);
            decreasing = decreasing && l < prev;
            prev = l;
        }
    }
    const double at = focal_loss(0.9, 1, 2.0);
    const double oracle_value = 1.053605156578263012275e-3;
    const bool pass = bce_gap < 1e-12 && decreasing && std::abs(at - oracle_value) < 1e-7;
    return {pass, "gamma=0 vs BCE " + fmt("%.1e", bce_gap) + ", strictly decreasing: " + (decreasing ? "yes" : "no") +
                      ", FL(0.9)=" + fmt("%.10e", at)};
}

SynthSpec end_to_end_spec(double separation, std::uint64_t seed) {
    SynthSpec spec;
    spec.n_samples = 300;
    spec.positive_rate = 0.5;
    spec.separation = separation;
    spec.correlation = 0.5;
    spec.seed = seed;
    return spec;
}

struct HoldoutRun {
    Metrics test;
    TrainResult result;
    double seconds;
};

HoldoutRun holdout_run(const SynthSpec& spec, std::uint64_t train_seed) {
    const Dataset ds = generate(spec);
    auto [train_set, test_set] = stratified_split(ds, 2.0 / 3.0, mix_seed(spec.seed, 0));
    TrainConfig cfg;
    cfg.seed = train_seed;
    const auto t0 = Clock::now();
    TrainResult r = fit(train_set, ModelConfig{}, cfg);
    const double secs = seconds_since(t0);
    return {evaluate(r.params, test_set, cfg.threshold), std::move(r), secs};
}

Dataset toy_set() {
    SynthSpec spec;
    spec.n_samples = 16;
    spec.separation = 8.0;
    spec.seed = 42;
    return generate(spec);
}

TrainResult overfit(const Dataset& ds, MixVariant variant) {
    ModelConfig model;
    model.variant = variant;
    TrainConfig cfg;
    cfg.patience = 0;
    return train(ModelParams::init(model, 42), ds, {}, cfg);
}

Outcome fusion_weights() {
    const Dataset ds = toy_set();
    bool ok = true;
    double lo = 1.0, hi = 0.0;
    std::size_t blocks = 0;
    for (MixVariant v : {MixVariant::MatrixLiteral, MixVariant::ScalarElementwise, MixVariant::CorrSelf,
                         MixVariant::CorrCross}) {
        const TrainResult r = overfit(ds, v);
        ok = ok && r.history.size() == 200;
        for (const char* blk : kFusionBlocks) {
            const AmrfParams p = r.last_params.fusion_block(blk);
            for (double w : {p.alpha(), p.beta()}) {
                ok = ok && w > 0.0 && w < 1.0;
                lo = std::min(lo, w);
                hi = std::max(hi, w);
            }
            ++blocks;
        }
    }
    return {ok, std::to_string(blocks) + " blocks after 200 epochs, alpha/beta in [" + fmt("%.4f", lo) + ", " +
                    fmt("%.4f", hi) + "]"};
}

Outcome learnability() {
    const HoldoutRun main = holdout_run(end_to_end_spec(8.0, 42), 1);
    bool ok = main.test.f1 >= 0.95 && main.result.history.size() <= 200 && main.seconds < 60.0;
    std::string detail = "s=8 test F1=" + fmt("%.3f", main.test.f1) + " in " +
                         std::to_string(main.result.history.size()) + " epochs, " + fmt("%.1fs", main.seconds) +
                         "; s=0 F1:";
    for (std::uint64_t seed = 42; seed < 47; ++seed) {
        const HoldoutRun control = holdout_run(end_to_end_spec(0.0, seed), seed);
        ok = ok && control.test.f1 >= 0.3 && control.test.f1 <= 0.7;
        detail += " " + fmt("%.3f", control.test.f1);
    }
    return {ok, detail};
}

Outcome overfit_harness() {
    const Dataset ds = toy_set();
    const TrainResult r = overfit(ds, MixVariant::MatrixLiteral);
    std::size_t first = 0;
    for (const EpochRecord& rec : r.history) {
        if (rec.validation.accuracy() == 1.0) {
            first = rec.epoch;
            break;
        }
    }
    const double acc = evaluate(r.params, ds, 0.5).accuracy();
    return {first != 0 && acc == 1.0,
            "16 samples, train accuracy " + fmt("%.3f", acc) +
                (first ? " first reached 1.0 at epoch " + std::to_string(first) : std::string(", never 1.0"))};
}

Outcome metric_arithmetic() {
    const double a = f1_score(0.71, 0.83);
    const double b = f1_score(0.94, 0.97);
    const std::string ra = fmt("%.2f", a), rb = fmt("%.2f", b);
    return {ra == "0.77" && rb == "0.95", "F1(0.71,0.83)=" + fmt("%.4f", a) + " -> " + ra +
                                              ", F1(0.94,0.97)=" + fmt("%.4f", b) + " -> " + rb};
}

std::string checksum(const std::string& bytes) { return std::to_string(std::hash<std::string>{}(bytes)); }

Outcome determinism() {
    SynthSpec spec;
    spec.n_samples = 24;
    spec.seed = 9;
    const Dataset ds = generate(spec);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.patience = 0;
    const TrainResult a = fit(ds, ModelConfig{}, cfg);
    const TrainResult b = fit(ds, ModelConfig{}, cfg);
    bool same_history = a.history.size() == b.history.size();
    for (std::size_t i = 0; same_history && i < a.history.size(); ++i) {
        same_history = a.history[i] == b.history[i] &&
                       std::bit_cast<std::uint64_t>(a.history[i].train_loss) ==
                           std::bit_cast<std::uint64_t>(b.history[i].train_loss);
    }

    std::ostringstream d1, d2, c1, c2;
    write_dataset(ds, d1);
    std::istringstream din(d1.str());
    write_dataset(load_dataset(din), d2);
    save_checkpoint(a.params, c1);
    std::istringstream cin(c1.str());
    const ModelParams reloaded = load_checkpoint(cin);
    save_checkpoint(reloaded, c2);
    const bool data_rt = d1.str() == d2.str() && checksum(d1.str()) == checksum(d2.str());
    const bool ckpt_rt = c1.str() == c2.str() && reloaded.store == a.params.store;
    return {same_history && data_rt && ckpt_rt, std::string("history bitwise equal: ") +
                                                    (same_history ? "yes" : "no") + ", dataset rewrite " +
                                                    (data_rt ? "equal" : "differs") + ", checkpoint rewrite " +
                                                    (ckpt_rt ? "equal" : "differs")};
}

}  // namespace

int main() {
    report(1, "gradient fidelity", gradient_fidelity);
    report(2, "circulant oracle", circulant_oracle);
    report(3, "attention algebra", attention_algebra);
    report(4, "focal-loss limits", focal_limits);
    report(5, "fusion-weight constraint", fusion_weights);
    report(6, "end-to-end learnability", learnability);
    report(7, "overfit harness", overfit_harness);
    report(8, "metric arithmetic", metric_arithmetic);
    report(9, "determinism and persistence", determinism);
    fs::remove_all(scratch_dir());
    return failures == 0 ? 0 : 1;
}
