#include <doctest.h>

#include <cmath>
#include <random>

#include "canamrf/errors.hpp"
#include "canamrf/trainer.hpp"
#include "oracles.hpp"

using namespace canamrf;

namespace {

ModelConfig small_config() {
    ModelConfig cfg;
    cfg.dims = ModalityDims{12, 6, 7, 8};
    cfg.conv_dim = 6;
    cfg.d = 4;
    cfg.k = 2;
    cfg.hidden = 6;
    return cfg;
}

Dataset toy(std::size_t n, double separation, std::uint64_t seed) {
    SynthSpec spec;
    spec.n_samples = n;
    spec.dims = small_config().dims;
    spec.separation = separation;
    spec.seed = seed;
    return generate(spec);
}

}  // namespace

TEST_CASE("metric formulas") {
    const Metrics perfect = Metrics::from_counts(5, 0, 0, 7);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.accuracy() == 1.0);

    const Metrics all_pos = Metrics::from_counts(10, 10, 0, 0);
    CHECK(all_pos.precision == 0.5);
    CHECK(all_pos.recall == 1.0);
    CHECK(all_pos.f1 == doctest::Approx(2.0 / 3.0));

    const Metrics none = Metrics::from_counts(0, 0, 4, 4);
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);

    CHECK(std::round(f1_score(0.71, 0.83) * 100) / 100 == 0.77);
    CHECK(std::round(f1_score(0.94, 0.97) * 100) / 100 == 0.95);
    CHECK(f1_score(0.71, 0.83) == doctest::Approx(0.7653246753246753).epsilon(1e-13));
    CHECK(f1_score(0.94, 0.97) == doctest::Approx(0.9547643979057592).epsilon(1e-13));
}

TEST_CASE("F1 lies between precision and recall") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> c(0, 50);
    for (int trial = 0; trial < 500; ++trial) {
        const Metrics m = Metrics::from_counts(c(rng) + 1, c(rng), c(rng), c(rng));
        CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-15);
        CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-15);
        if (m.precision == m.recall) CHECK(std::abs(m.f1 - m.precision) < 1e-15);
    }
}

TEST_CASE("evaluate is order invariant") {
    const Dataset ds = toy(20, 2.0, 2);
    const ModelParams p = ModelParams::init(small_config(), 3);
    Dataset shuffled = ds;
    std::mt19937_64 rng(4);
    std::shuffle(shuffled.samples.begin(), shuffled.samples.end(), rng);
    CHECK(evaluate(p, ds, 0.5) == evaluate(p, shuffled, 0.5));
    const Metrics m = evaluate(p, ds, 0.5);
    CHECK(m.total() == 20);
}

TEST_CASE("adam two-step trace") {
    TrainConfig cfg;
    cfg.lr = 0.1;
    Tensor2 p = Tensor2::scalar(1.0);
    AdamState st;
    step_adam(p, Tensor2::scalar(0.5), st, cfg);
    // 40-digit reference values.
    CHECK(std::abs(p[0] - 0.9000000019999999600000007999999840000003) < 1e-12);
    CHECK(std::abs(st.m[0] - 0.05) < 1e-15);
    step_adam(p, Tensor2::scalar(-0.25), st, cfg);
    CHECK(std::abs(p[0] - 0.8733662987078461625593764028653466657847) < 1e-12);
    CHECK(std::abs(st.v[0] - 0.00031225) < 1e-15);
    CHECK(st.steps == 2);
}

TEST_CASE("adam with zero gradient leaves parameters and decays moments") {
    TrainConfig cfg;
    std::mt19937_64 rng(5);
    const Tensor2 start = oracle::random_tensor(3, 3, rng);
    Tensor2 p = start;
    AdamState st;
    step_adam(p, Tensor2(3, 3), st, cfg);
    CHECK(p == start);

    AdamState warm{Tensor2(1, 1, 0.2), Tensor2(1, 1, 0.04), 3};
    Tensor2 q = Tensor2::scalar(0.0);
    step_adam(q, Tensor2::scalar(0.0), warm, cfg);
    CHECK(warm.m[0] == doctest::Approx(0.18));
    CHECK(warm.v[0] == doctest::Approx(0.04 * 0.999));
}

TEST_CASE("sgd step is linear in the gradient") {
    std::mt19937_64 rng(6);
    const Tensor2 start = oracle::random_tensor(2, 4, rng);
    const Tensor2 g = oracle::random_tensor(2, 4, rng);
    Tensor2 a = start, b = start;
    step_sgd(a, g, 0.01);
    step_sgd(b, scale(g, 4.0), 0.01);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK((start[i] - b[i]) == doctest::Approx(4.0 * (start[i] - a[i])));
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.threshold = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.lr = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(parse_optimizer("rmsprop"), ConfigError);
}

TEST_CASE("lr = 0 leaves parameters unchanged") {
    const Dataset ds = toy(12, 4.0, 7);
    const ModelParams init = ModelParams::init(small_config(), 8);
    for (OptimizerKind opt : {OptimizerKind::Adam, OptimizerKind::Sgd}) {
        TrainConfig cfg;
        cfg.lr = 0.0;
        cfg.epochs = 3;
        cfg.optimizer = opt;
        const TrainResult r = train(init, ds, {}, cfg);
        CHECK(r.params == init);
        CHECK(r.last_params == init);
    }
}

TEST_CASE("training is deterministic and early stopping keeps the best epoch") {
    const Dataset ds = toy(24, 3.0, 9);
    auto [fit, val] = stratified_split(ds, 0.75, 1);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.patience = 5;
    cfg.lr = 0.01;
    const ModelParams init = ModelParams::init(small_config(), 10);
    const TrainResult a = train(init, fit, val, cfg);
    const TrainResult b = train(init, fit, val, cfg);
    CHECK(a.history == b.history);
    CHECK(a.params == b.params);

    double best = -1;
    for (const EpochRecord& r : a.history) best = std::max(best, r.validation.f1);
    CHECK(a.history[a.best_epoch - 1].validation.f1 == best);
    CHECK(evaluate(a.params, val, cfg.threshold) == a.history[a.best_epoch - 1].validation);
    CHECK(a.history.size() <= a.best_epoch + cfg.patience);
}

TEST_CASE("train rejects single-class data") {
    Dataset ds = toy(12, 4.0, 11);
    std::erase_if(ds.samples, [](const Sample& s) { return s.label == 1; });
    CHECK_THROWS_AS(train(ModelParams::init(small_config(), 1), ds, {}, TrainConfig{}), ContractError);
}

TEST_CASE("divergence is reported with epoch and batch") {
    const Dataset ds = toy(8, 4.0, 12);
    ModelParams p = ModelParams::init(small_config(), 13);
    p.store.value("head.fc2.bias")[0] = NAN;
    TrainConfig cfg;
    cfg.epochs = 2;
    try {
        train(p, ds, {}, cfg);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("epoch 1") != std::string::npos);
        CHECK(msg.find("batch 0") != std::string::npos);
    }
}

TEST_CASE("overfit a small separable set") {
    const Dataset ds = toy(16, 8.0, 14);
    TrainConfig cfg;
    cfg.patience = 0;
    cfg.epochs = 200;
    const TrainResult r = train(ModelParams::init(small_config(), 15), ds, {}, cfg);
    CHECK(evaluate(r.params, ds, 0.5).accuracy() == 1.0);

    std::vector<double> smooth;
    for (std::size_t i = 0; i + 10 <= r.history.size(); ++i) {
        double s = 0;
        for (std::size_t j = i; j < i + 10; ++j) s += r.history[j].train_loss;
        smooth.push_back(s / 10);
    }
    for (std::size_t i = 1; i < smooth.size(); ++i) CHECK(smooth[i] <= smooth[i - 1]);
}

TEST_CASE("epoch records format as key=value") {
    EpochRecord rec{3, 0.25, Metrics::from_counts(1, 1, 0, 2)};
    CHECK(format_epoch_record(rec) ==
          "epoch=3 train_loss=0.25 val_precision=0.5 val_recall=1 val_f1=0.6666666666666666 tp=1 fp=1 fn=0 tn=2");
}

TEST_CASE("fit holds out a stratified validation split") {
    const Dataset ds = toy(30, 4.0, 21);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.patience = 0;
    cfg.val_fraction = 0.2;
    const TrainResult a = fit(ds, small_config(), cfg);
    const TrainResult b = fit(ds, small_config(), cfg);
    REQUIRE(a.history.size() == 2);
    CHECK(a.history == b.history);
    CHECK(a.history[0].validation.total() == 6);
    cfg.seed = 2;
    CHECK(!(fit(ds, small_config(), cfg).last_params == a.last_params));
}
