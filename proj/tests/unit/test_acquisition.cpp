#include <doctest.h>

#include <cmath>
#include <numbers>

#include "corrattack/acquisition.hpp"
#include "corrattack/errors.hpp"
#include "oracles.hpp"

using namespace corrattack;

TEST_SUITE("acquisition") {

TEST_CASE("closed form at gamma zero") {
    for (double sigma : {0.1, 1.0, 3.0})
        CHECK(std::abs(expected_improvement(0.2, sigma * sigma, 0.2) -
                       sigma / std::sqrt(2.0 * std::numbers::pi)) <= 1e-12);
}

TEST_CASE("zero variance degenerates to the plain improvement") {
    CHECK(expected_improvement(1.0, 0.0, 3.0) == 2.0);
    CHECK(expected_improvement(3.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("agrees with monte carlo") {
    const struct { double mean, sigma, best; } cases[] = {
        {0.0, 1.0, 0.0}, {1.0, 0.5, -0.5}, {-1.0, 0.3, 0.0}, {0.3, 2.0, 0.1}};
    std::uint64_t seed = 1;
    for (const auto& c : cases) {
        const double mc = oracle::monte_carlo_ei(c.mean, c.sigma, c.best, 400000, seed++);
        CHECK(std::abs(expected_improvement(c.mean, c.sigma * c.sigma, c.best) - mc) <= 5e-3);
    }
}

TEST_CASE("monotone in best and in sigma") {
    double prev = 0.0;
    for (double best = -3.0; best <= 3.0; best += 0.25) {
        const double ei = expected_improvement(0.0, 1.0, best);
        CHECK(ei >= prev);
        prev = ei;
    }
    prev = 0.0;
    for (double s = 0.1; s <= 3.0; s += 0.1) {
        const double ei = expected_improvement(0.5, s * s, 0.0);
        CHECK(ei >= prev);
        prev = ei;
    }
}

TEST_CASE("selection takes the argmax and breaks ties low") {
    const gp::GpPosterior same{0.0, 1.0};
    const Candidate tied[] = {{7, same}, {3, same}, {5, same}};
    CHECK(select_action(tied, 0.0).action_id == 3);

    const Candidate mixed[] = {{0, {1.0, 0.1}}, {1, {-1.0, 0.1}}, {2, {0.0, 0.1}}};
    const auto pick = select_action(mixed, 0.0);
    CHECK(pick.action_id == 1);
    CHECK(pick.ei == doctest::Approx(expected_improvement(-1.0, 0.1, 0.0)));
    CHECK_THROWS_AS(select_action(std::span<const Candidate>{}, 0.0), NoCandidates);
}

}
