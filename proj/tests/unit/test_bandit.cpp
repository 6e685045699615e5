#include <doctest.h>

#include <cmath>

#include "corrattack/bandit.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace corrattack;

namespace {

Feature feat(double v) { return {v, v, v, v}; }

bool ball_is_empty(const SampleSet& w, const BlockIndex& b, int alpha) {
    for (const auto& e : w.entries())
        if (std::abs(e.block.i - b.i) + std::abs(e.block.j - b.j) <= alpha) return false;
    return true;
}

}  // namespace

TEST_SUITE("bandit") {

TEST_CASE("acceptance clears the alpha ball and drops the observation") {
    SampleSet w(12);
    w.update(false, {3, 3, 0}, feat(0.1), 1.0, 1);
    w.update(false, {3, 4, 1}, feat(0.2), 2.0, 1);
    w.update(false, {2, 3, 2}, feat(0.3), 3.0, 1);
    w.update(false, {5, 5, 0}, feat(0.4), 4.0, 1);
    const SampleSet after = update_samples(w, true, {3, 3, 0}, feat(0.5), -1.0, 1);
    REQUIRE(after.size() == 1);
    CHECK(after.entries().front().block == BlockIndex{5, 5, 0});
    CHECK(w.size() == 4);
}

TEST_CASE("rejection appends and the oldest entries are evicted") {
    SampleSet w(3);
    for (int t = 0; t < 5; ++t) w.update(false, {t, 0, 0}, feat(0.1 * t), t, 0);
    REQUIRE(w.size() == 3);
    CHECK(w.entries().front().block.i == 2);
    CHECK(w.entries().back().block.i == 4);
    CHECK(w.entries().front().birth < w.entries().back().birth);
    CHECK(w.contains({3, 0, 0}));
    CHECK_FALSE(w.contains({1, 0, 0}));
}

TEST_CASE("alpha zero removes only the accepted block position across channels") {
    SampleSet w(10);
    w.update(false, {1, 1, 0}, feat(0.1), 1.0, 0);
    w.update(false, {1, 1, 2}, feat(0.2), 1.0, 0);
    w.update(false, {1, 2, 0}, feat(0.3), 1.0, 0);
    w.update(true, {1, 1, 1}, feat(0.4), -1.0, 0);
    CHECK(w.size() == 1);
    CHECK(ball_is_empty(w, {1, 1, 1}, 0));
}

TEST_CASE("window dataset is standardized") {
    SampleSet w(5);
    w.update(false, {0, 0, 0}, feat(0.0), 2.0, 0);
    w.update(false, {0, 1, 0}, feat(1.0), 4.0, 0);
    const auto d = w.dataset();
    CHECK(d.size() == 2);
    CHECK(d.raw_mean() == doctest::Approx(3.0));
    CHECK(d.values()[0] == doctest::Approx(-d.values()[1]));
}

TEST_CASE("action sets") {
    const Shape s{2, 8, 8};
    const BlockGrid g = make_grid(s, 4);
    Image pert(s, 0.05);
    add_block_delta(pert, g, {0, 1, 0}, -0.1);
    add_block_delta(pert, g, {1, 1, 1}, -0.1);

    const auto diff = make_action_set(ActionMode::Diff, g, pert, 0.05, 0.03);
    CHECK(diff.size() == g.block_count());
    CHECK(diff[3].magnitude == 0.03);

    const auto neg = make_action_set(ActionMode::FlipNegativePass, g, pert, 0.05, 0.03);
    REQUIRE(neg.size() == 2);
    CHECK(neg[0].kind == ActionKind::FlipToPos);
    CHECK(neg[0].block == BlockIndex{0, 1, 0});
    CHECK(neg[0].flip_amount() == doctest::Approx(0.1));

    const auto pos = make_action_set(ActionMode::FlipPositivePass, g, pert, 0.05, 0.03);
    CHECK(pos.size() == g.block_count() - 2);
    CHECK(pos[0].flip_amount() == doctest::Approx(-0.1));
}

TEST_CASE("pca scores match a dense eigensolver") {
    const Shape s{3, 16, 16};
    const BlockGrid g = make_grid(s, 4);
    REQUIRE(g.block_count() == 48);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Image x = fixtures::noise_image(s, 100 + seed);
        const auto got = pca_first_component(x, g);
        const auto want = oracle::pca_scores_eigen(x, g);
        REQUIRE(got.size() == want.size());
        for (std::size_t l = 0; l < got.size(); ++l) CHECK(std::abs(got[l] - want[l]) <= 1e-6);
    }
}

TEST_CASE("pca of identical blocks is flat") {
    const Shape s{1, 8, 8};
    const auto scores = pca_first_component(Image(s, 0.3), make_grid(s, 4));
    for (double v : scores) CHECK(v == 0.5);
}

TEST_CASE("features are normalized block coordinates") {
    const BlockGrid g = make_grid(Shape{3, 16, 16}, 4);
    std::vector<double> pca(g.block_count(), 0.25);
    const auto f = make_features(g, pca);
    const Feature last = f[g.linear_index({3, 3, 2})];
    CHECK(last == Feature{1.0, 1.0, 1.0, 0.25});
    CHECK(f[g.linear_index({1, 2, 1})] == Feature{1.0 / 3, 2.0 / 3, 0.5, 0.25});
    CHECK_THROWS_AS(make_features(g, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("flip evaluation is one query and consistent on acceptance") {
    const Shape s{3, 8, 8};
    auto model = fixtures::linear_model(s, 4, 5);
    SyntheticOracle net(model);
    const Image x = fixtures::noise_image(s, 8, 0.1, 0.9);
    LossOracle oracle(net, LossSpec::untargeted(argmax_class(net.query(x)), 0.05));
    const BlockGrid g = make_grid(s, 4);
    const Image x_t = project_ball(apply_block_delta(x, g, {0, 0, 0}, -0.05), x, 0.05);
    const double loss = oracle.evaluate(x_t).loss;
    const std::size_t before = oracle.queries_used();
    const ActionSpec a{ActionKind::FlipToPos, {0, 0, 0}, 0.1};
    const auto d = evaluate_difference(oracle, x_t, loss, x, 0.05, g, a);
    CHECK(d.queries == 1);
    CHECK(oracle.queries_used() - before == 1);
    CHECK(d.step == doctest::Approx(0.1));
    CHECK(oracle.evaluate(d.candidate).loss == loss + d.g);
    CHECK(linf_distance(d.candidate, x) <= 0.05 + 1e-15);
}

TEST_CASE("diff evaluation keeps the lower side and prefers plus on ties") {
    const Shape s{1, 4, 4};
    const BlockGrid g = make_grid(s, 2);
    std::vector<std::vector<double>> w(2, std::vector<double>(s.size(), 0.0));
    w[0][0] = 1.0;  // class 0 logit rises with the top-left pixel
    auto model = std::make_shared<LinearModel>(s, w, std::vector<double>{0.0, -1.0});
    SyntheticOracle net(model);
    const Image x(s, 0.5);
    LossOracle oracle(net, LossSpec::untargeted(0, 5.0));
    const double loss = oracle.evaluate(x).loss;

    const auto d = evaluate_difference(oracle, x, loss, x, 0.05, g, {ActionKind::Diff, {0, 0, 0}, 0.03});
    CHECK(d.queries == 2);
    CHECK(d.step == doctest::Approx(-0.03));
    CHECK(d.g == doctest::Approx(-0.03));

    const auto flat = evaluate_difference(oracle, x, loss, x, 0.05, g, {ActionKind::Diff, {1, 1, 0}, 0.03});
    CHECK(flat.step == doctest::Approx(0.03));
    CHECK(flat.g == 0.0);
}

TEST_CASE("diff evaluation stops after an adversarial plus step") {
    const Shape s{1, 2, 2};
    std::vector<std::vector<double>> w(2, std::vector<double>(s.size(), 0.0));
    w[1][0] = 10.0;
    auto model = std::make_shared<LinearModel>(s, w, std::vector<double>{0.3, -4.9});
    SyntheticOracle net(model);
    const Image x(s, 0.5);
    LossOracle oracle(net, LossSpec::untargeted(0, 0.05));
    const double loss = oracle.evaluate(x).loss;
    const auto d = evaluate_difference(oracle, x, loss, x, 0.05, make_grid(s, 2),
                                       {ActionKind::Diff, {0, 0, 0}, 0.03});
    CHECK(d.success);
    CHECK(d.queries == 1);
}

}
