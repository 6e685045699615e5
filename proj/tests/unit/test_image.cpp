#include <doctest.h>

#include "corrattack/errors.hpp"
#include "corrattack/image.hpp"
#include "fixtures.hpp"

using namespace corrattack;

TEST_SUITE("image") {

TEST_CASE("projection clips to the ball and then to the unit range") {
    const Image origin(Shape{1, 1, 4}, std::vector<double>{0.0, 0.5, 0.98, 0.3});
    const Image cand(Shape{1, 1, 4}, std::vector<double>{-0.2, 0.58, 1.2, 0.31});
    const Image p = project_ball(cand, origin, 0.05);
    CHECK(p.at(0, 0, 0) == 0.0);
    CHECK(p.at(0, 0, 1) == doctest::Approx(0.55).epsilon(1e-15));
    CHECK(p.at(0, 0, 2) == 1.0);
    CHECK(p.at(0, 0, 3) == doctest::Approx(0.31).epsilon(1e-15));
}

TEST_CASE("projection is idempotent and stays feasible") {
    const Shape s{3, 8, 8};
    const Image origin = fixtures::noise_image(s, 1);
    const Image cand = fixtures::noise_image(s, 2, -0.5, 1.5);
    const Image p = project_ball(cand, origin, 0.05);
    CHECK(project_ball(p, origin, 0.05) == p);
    CHECK(linf_distance(p, origin) <= 0.05 + 1e-15);
    for (double v : p.pixels()) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("grids and splitting") {
    const BlockGrid g = make_grid(Shape{3, 32, 32}, 32);
    CHECK(g.h == 1);
    CHECK(g.w == 1);
    CHECK(g.block_count() == 3);
    const BlockGrid s = split_blocks(g);
    CHECK(s.block_size == 16);
    CHECK(s.h == 2);
    CHECK(s.stage == 1);
    CHECK_THROWS_AS(make_grid(Shape{3, 32, 32}, 5), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(Shape{3, 32, 32}, 64), std::invalid_argument);
    CHECK_THROWS_AS(split_blocks(make_grid(Shape{1, 4, 4}, 1)), CannotSplit);
}

TEST_CASE("linear index round trip is channel major") {
    const BlockGrid g = make_grid(Shape{3, 16, 16}, 4);
    for (std::size_t l = 0; l < g.block_count(); ++l) CHECK(g.linear_index(g.block_at(l)) == l);
    CHECK(g.linear_index({1, 2, 2}) == (2u * 4 + 1) * 4 + 2);
}

TEST_CASE("block deltas touch exactly one block") {
    const Shape s{2, 8, 8};
    const BlockGrid g = make_grid(s, 4);
    const Image x(s, 0.5);
    const Image y = apply_block_delta(x, g, {1, 0, 1}, 0.25);
    CHECK(block_sum(y, g, {1, 0, 1}) == doctest::Approx(16 * 0.75));
    CHECK(block_sum(y, g, {0, 0, 1}) == doctest::Approx(16 * 0.5));
    CHECK(block_sum(y, g, {1, 0, 0}) == doctest::Approx(16 * 0.5));
    CHECK(linf_distance(x, y) == doctest::Approx(0.25));
    CHECK_THROWS_AS(apply_block_delta(x, g, {2, 0, 0}, 1.0), std::invalid_argument);
}

TEST_CASE("shape checks") {
    CHECK_THROWS_AS(Image(Shape{1, 2, 2}, std::vector<double>(3)), std::invalid_argument);
    CHECK_THROWS_AS(linf_distance(Image(Shape{1, 2, 2}), Image(Shape{1, 2, 3})),
                    std::invalid_argument);
}

}
