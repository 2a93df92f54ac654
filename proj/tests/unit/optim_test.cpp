#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rrfnn/errors.hpp"
#include "rrfnn/optim.hpp"
#include "test_util.hpp"

using namespace rrfnn;
using namespace rrfnn::testing;

namespace {

// Two linearly separable classes: class c has band c bright.
PatchList toy_set(std::size_t per_class, Rng& rng) {
    std::vector<PatchTensor> out;
    const Dims3 d{2, 3, 3};
    for (std::size_t n = 0; n < per_class; ++n) {
        for (std::size_t c = 0; c < 2; ++c) {
            Tensor3 t = random_tensor(d, rng, 0.0, 0.3);
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t i = 0; i < 3; ++i) t(c, j, i) += 0.7;
            out.push_back({std::move(t), one_hot(c, 2), {}});
        }
    }
    return PatchList(std::move(out));
}

NetworkShape toy_shape() {
    NetworkShape s;
    s.hidden = 4;
    s.rank = 1;
    s.classes = 2;
    s.side = 3;
    s.bands = 2;
    return s;
}

class PoisonedSource final : public PatchSource {
public:
    std::size_t size() const override { return 4; }
    Dims3 dims() const override { return {2, 3, 3}; }
    std::size_t label(std::size_t i) const override { return i % 2; }
    void fill(std::size_t, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), std::numeric_limits<double>::quiet_NaN());
    }
};

}  // namespace

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
    std::vector<double> p{1.0, -2.0, 0.5};
    const std::vector<double> g{0.3, -4.0, 0.0};
    AdamState st(3, {0.01, 0.9, 0.999, 1e-8});
    adam_step(p, g, st);
    // m_hat = g, v_hat = g^2 on the first step.
    EXPECT_NEAR(p[0], 1.0 - 0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
    EXPECT_NEAR(p[1], -2.0 + 0.01 * 4.0 / (4.0 + 1e-8), 1e-15);
    EXPECT_EQ(p[2], 0.5);
    EXPECT_EQ(st.step_count, 1u);
}

TEST(Adam, MatchesHandRolledRecurrence) {
    const AdamHyper h{0.05, 0.8, 0.95, 1e-6};
    std::vector<double> p{0.7};
    AdamState st(1, h);
    double m = 0, v = 0, theta = 0.7;
    for (int t = 1; t <= 25; ++t) {
        const double g = 2.0 * (theta - 0.1) + 0.3 * std::sin(t);
        const std::vector<double> grad{2.0 * (p[0] - 0.1) + 0.3 * std::sin(t)};
        adam_step(p, grad, st);
        m = h.beta1 * m + (1 - h.beta1) * g;
        v = h.beta2 * v + (1 - h.beta2) * g * g;
        theta -= h.learning_rate * (m / (1 - std::pow(h.beta1, t))) / (std::sqrt(v / (1 - std::pow(h.beta2, t))) + h.epsilon);
        ASSERT_NEAR(p[0], theta, 1e-14);
    }
}

TEST(Adam, RejectsMismatchedLengthsAndBadHyper) {
    std::vector<double> p(3), g(2);
    AdamState st(3, {});
    EXPECT_THROW(adam_step(p, g, st), ShapeError);
    EXPECT_THROW(AdamState(3, AdamHyper{0.0}), InvalidArgument);
    EXPECT_THROW(AdamState(3, AdamHyper{1e-3, 1.0}), InvalidArgument);
}

TEST(TrainConfig, RejectsZeroEpochsAndBatch) {
    TrainConfig c;
    c.epochs = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c.epochs = 1;
    c.batch_size = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Train, LearnsSeparableToyProblem) {
    Rng rng(1);
    const PatchList data = toy_set(20, rng);
    RankRFNN m(toy_shape());
    initialize(m, 1);
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.batch_size = 8;
    cfg.adam.learning_rate = 0.05;
    std::size_t calls = 0;
    const auto r = train(m, data, cfg, [&](std::size_t epoch, double) { EXPECT_EQ(epoch, calls++); });
    EXPECT_EQ(calls, 60u);
    ASSERT_EQ(r.loss_history.size(), 60u);
    EXPECT_LT(r.loss_history.back(), 0.1 * r.loss_history.front());

    std::vector<double> buf(18);
    for (std::size_t i = 0; i < data.size(); ++i) {
        data.fill(i, buf);
        EXPECT_EQ(predict(m, Tensor3View({2, 3, 3}, buf)), data.label(i));
    }
}

TEST(Train, DenseLearnsToo) {
    Rng rng(2);
    const PatchList data = toy_set(20, rng);
    DenseFNN m(toy_shape());
    initialize(m, 1);
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.adam.learning_rate = 0.02;
    const auto r = train(m, data, cfg);
    EXPECT_LT(r.loss_history.back(), 0.1 * r.loss_history.front());
}

TEST(Train, EpochLossIsMeanOverSamplesWithPartialBatch) {
    // One epoch, lr tiny: the first batch's loss is computed before any update,
    // so with a single batch covering everything the epoch loss is the mean
    // forward loss at the starting parameters.
    Rng rng(3);
    const PatchList data = toy_set(5, rng);  // 10 samples
    RankRFNN m(toy_shape());
    initialize(m, 4);
    double want = 0.0;
    std::vector<double> buf(18);
    for (std::size_t i = 0; i < data.size(); ++i) {
        data.fill(i, buf);
        want += cross_entropy(forward(m, Tensor3View({2, 3, 3}, buf)).probabilities, one_hot(data.label(i), 2));
    }
    want /= 10.0;
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 32;
    RankRFNN copy = m;
    EXPECT_NEAR(train(copy, data, cfg).loss_history[0], want, 1e-12);

    // batch 3 -> steps of 3, 3, 3, 1; still one history entry per epoch.
    cfg.batch_size = 3;
    cfg.epochs = 2;
    copy = m;
    EXPECT_EQ(train(copy, data, cfg).loss_history.size(), 2u);
}

TEST(Train, DeterministicForFixedSeed) {
    Rng rng(4);
    const PatchList data = toy_set(10, rng);
    RankRFNN a(toy_shape()), b(toy_shape());
    initialize(a, 9);
    initialize(b, 9);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 77;
    train(a, data, cfg);
    train(b, data, cfg);
    EXPECT_TRUE(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
}

TEST(Train, ReportsDivergence) {
    RankRFNN m(toy_shape());
    initialize(m, 1);
    TrainConfig cfg;
    cfg.epochs = 3;
    try {
        train(m, PoisonedSource{}, cfg);
        FAIL() << "expected DivergedError";
    } catch (const DivergedError& e) {
        EXPECT_EQ(e.epoch(), 0u);
    }
}

TEST(Train, RejectsEmptyOrMismatchedSets) {
    RankRFNN m(toy_shape());
    TrainConfig cfg;
    EXPECT_THROW(train(m, PatchList({}), cfg), InvalidArgument);
    NetworkShape other = toy_shape();
    other.side = 5;
    RankRFNN wrong(other);
    Rng rng(5);
    EXPECT_THROW(train(wrong, toy_set(2, rng), cfg), ShapeError);
}
