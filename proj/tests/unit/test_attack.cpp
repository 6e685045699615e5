#include <doctest.h>

#include <cmath>

#include "corrattack/attack.hpp"
#include "corrattack/errors.hpp"
#include "corrattack/result_json.hpp"
#include "fixtures.hpp"

using namespace corrattack;

namespace {

constexpr Shape kSmall{3, 16, 16};

AttackConfig small_config(AttackMode mode, std::uint64_t seed = 1) {
    AttackConfig c = AttackConfig::defaults(mode);
    c.initial_block = 16;
    c.query_budget = 2000;
    c.seed = seed;
    return c;
}

struct Checker final : AttackObserver {
    double eps = 0.05;
    double last_loss = std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    std::size_t evaluations = 0;

    void check_state(const AttackState& s) {
        if (linf_distance(s.x_t, s.origin) > eps + 1e-12) ++violations;
        for (double v : s.x_t.pixels())
            if (v < 0.0 || v > 1.0) ++violations;
        if (s.current_loss > last_loss) ++violations;
        last_loss = s.current_loss;
    }
    void on_query(const AttackState& s, std::size_t) override {
        last_loss = std::numeric_limits<double>::infinity();
        check_state(s);
    }
    void on_evaluation(const EvaluationEvent& e) override {
        ++evaluations;
        check_state(*e.state);
        if (e.window && e.window->size() > e.window->capacity()) ++violations;
    }
};

}  // namespace

TEST_SUITE("attack") {

TEST_CASE("modes parse and alpha schedules") {
    CHECK(parse_attack_mode("diff") == AttackMode::Diff);
    CHECK(to_string(AttackMode::Flip) == "flip");
    CHECK_THROWS_AS(parse_attack_mode("both"), std::invalid_argument);
    const AttackConfig flip = AttackConfig::defaults(AttackMode::Flip);
    CHECK(flip.alpha_for(32) == 1);
    CHECK(flip.alpha_for(2) == 3);
    const AttackConfig diff = AttackConfig::defaults(AttackMode::Diff);
    CHECK(diff.alpha_for(8) == 1);
    CHECK(diff.alpha_for(2) == 2);
    CHECK(diff.alpha_for(3) == 2);
}

TEST_CASE("invalid settings are rejected") {
    AttackConfig c = AttackConfig::defaults(AttackMode::Flip);
    c.epsilon = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = AttackConfig::defaults(AttackMode::Flip);
    c.sample_ratio = 0.2;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    auto model = fixtures::linear_model(kSmall);
    SyntheticOracle net(model);
    const Image x = fixtures::noise_image(kSmall, 1);
    CHECK_THROWS_AS(run_attack(net, x, 10, small_config(AttackMode::Flip)), std::invalid_argument);
}

TEST_CASE("an adversarial input costs one query") {
    fixtures::FixedLogits net({0.0, 1.0});
    const Image x(kSmall, 0.5);
    const AttackResult r = run_attack(net, x, 0, small_config(AttackMode::Flip));
    CHECK(r.success);
    CHECK(r.queries == 1);
    CHECK(r.termination == "success");
    CHECK(r.final_image == x);
}

TEST_CASE("flip runs keep every invariant") {
    auto model = fixtures::linear_model(kSmall, 3);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        SyntheticOracle net(model);
        const Image x = fixtures::noise_image(kSmall, 50 + seed);
        const int label = argmax_class(net.query(x));
        Checker chk;
        const AttackResult r = run_attack(net, x, label, small_config(AttackMode::Flip, seed), &chk);
        CHECK(chk.violations == 0);
        CHECK(chk.evaluations > 0);
        CHECK(r.queries == r.loss_trace.size());
        CHECK(linf_distance(r.final_image, x) <= 0.05 + 1e-12);
        for (std::size_t i = 1; i < r.accepted.size(); ++i)
            CHECK(r.accepted[i].loss < r.accepted[i - 1].loss);
    }
}

TEST_CASE("diff runs spend two queries per evaluation") {
    auto model = fixtures::linear_model(kSmall, 3);
    SyntheticOracle net(model);
    const Image x = fixtures::noise_image(kSmall, 60);
    const int label = argmax_class(net.query(x));
    struct Count final : AttackObserver {
        std::size_t bad = 0;
        void on_evaluation(const EvaluationEvent& e) override {
            const std::size_t spent = e.queries_after - e.queries_before;
            if (!(spent == 2 || (spent == 1 && e.success))) ++bad;
        }
    } count;
    const AttackResult r = run_attack(net, x, label, small_config(AttackMode::Diff), &count);
    CHECK(count.bad == 0);
    CHECK(r.stages.front().pass == "diff");
}

TEST_CASE("budget exhaustion stops the run at the budget") {
    fixtures::FixedLogits net({1.0, 0.0});
    AttackConfig c = small_config(AttackMode::Flip);
    c.initial_block = 2;
    c.query_budget = 7;
    net.set_budget(1000);
    const AttackResult r = run_attack(net, Image(kSmall, 0.5), 0, c);
    CHECK_FALSE(r.success);
    CHECK(r.queries == 7);
    CHECK(r.termination == "budget");
    REQUIRE_FALSE(r.stages.empty());
    CHECK(r.stages.back().stop == "budget");
    CHECK(net.budget() == std::optional<std::size_t>(1000));
}

TEST_CASE("a flat loss converges at the finest block size") {
    fixtures::FixedLogits net({1.0, 0.0});
    AttackConfig c = small_config(AttackMode::Flip);
    c.initial_block = 4;
    c.query_budget = 100000;
    const AttackResult r = run_attack(net, Image(Shape{1, 8, 8}, 0.5), 0, c);
    CHECK(r.termination == "converged");
    CHECK(r.accepted.empty());
    CHECK(r.stages.back().block_size == 2);
}

TEST_CASE("flip perturbations stay at plus or minus epsilon") {
    auto model = fixtures::linear_model(kSmall, 8);
    SyntheticOracle net(model);
    const Image x = fixtures::noise_image(kSmall, 70);
    const int label = argmax_class(net.query(x));
    struct Signs final : AttackObserver {
        std::size_t bad = 0;
        void on_evaluation(const EvaluationEvent& e) override {
            for (double v : e.state->perturbation.pixels())
                if (std::abs(std::abs(v) - 0.05) > 1e-15) ++bad;
        }
    } signs;
    run_attack(net, x, label, small_config(AttackMode::Flip), &signs);
    CHECK(signs.bad == 0);
}

TEST_CASE("random baseline visits each pass action once") {
    auto model = fixtures::linear_model(kSmall, 3);
    SyntheticOracle net(model);
    const Image x = fixtures::noise_image(kSmall, 80);
    const int label = argmax_class(net.query(x));
    Checker chk;
    const AttackResult r = random_block_baseline(net, x, label, small_config(AttackMode::Diff), &chk);
    CHECK(chk.violations == 0);
    for (const auto& st : r.stages)
        if (st.stop == "exhausted") CHECK(st.evaluations == st.actions);
    CHECK(r.stages.front().pass == "negative");
}

TEST_CASE("seeded runs are reproducible") {
    auto model = fixtures::linear_model(kSmall, 3);
    const Image x = fixtures::noise_image(kSmall, 90);
    SyntheticOracle a(model), b(model);
    const int label = argmax_class(model->logits(x));
    const auto ra = run_attack(a, x, label, small_config(AttackMode::Flip, 5));
    const auto rb = run_attack(b, x, label, small_config(AttackMode::Flip, 5));
    CHECK(attack_result_json(ra) == attack_result_json(rb));
}

TEST_CASE("targeted attacks reach the target class") {
    auto model = fixtures::linear_model(kSmall, 3, 3);
    SyntheticOracle net(model);
    const Image x = fixtures::noise_image(kSmall, 91);
    const auto f = net.query(x);
    const int label = argmax_class(f);
    AttackConfig c = small_config(AttackMode::Flip);
    c.target = (label + 1) % 3;
    const AttackResult r = run_attack(net, x, label, c);
    if (r.success) CHECK(argmax_class(model->logits(r.final_image)) == *c.target);
    CHECK(linf_distance(r.final_image, x) <= 0.05 + 1e-12);
}

}
