#pragma once

// Independent reference implementations used to check the library. None of
// them call into the code path they verify.

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "corrattack/bandit.hpp"
#include "corrattack/gp.hpp"
#include "corrattack/image.hpp"
#include "corrattack/stage.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Gauss-Jordan inverse with partial pivoting.
Matrix gauss_jordan_inverse(Matrix a);

/// Matern-5/2 ARD kernel written out from the closed form.
double matern52(const std::array<double, 4>& a, const std::array<double, 4>& b,
                const std::array<double, 4>& lengthscales, double outputscale);

struct Posterior {
    double mean = 0.0;
    double variance = 0.0;
};

/// Exact posterior of the latent function through an explicit inverse of
/// K + noise I.
Posterior dense_posterior(const std::vector<std::array<double, 4>>& z, std::span<const double> y,
                          const corrattack::gp::GpHyperparams& hp,
                          const std::array<double, 4>& query);

/// E[max(0, best - g)] for g ~ N(mean, sigma^2) from `draws` antithetic
/// normal samples.
double monte_carlo_ei(double mean, double sigma, double best, std::size_t draws,
                      std::uint64_t seed);

/// Textbook Adam ascent state.
struct AdamReference {
    double lr = 0.1, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::vector<double> m, v;
    int t = 0;

    std::vector<double> step(std::vector<double> theta, const std::vector<double>& grad);
};

/// First principal-component scores of the blocks via a dense symmetric
/// eigensolver, signed and normalized like the library contract.
std::vector<double> pca_scores_eigen(const corrattack::Image& natural,
                                     const corrattack::BlockGrid& grid);

struct TraceStep {
    std::size_t action = 0;
    double g = 0.0;
    bool accepted = false;
    bool operator==(const TraceStep&) const = default;
};

/// Straight-line rendition of one bandit pass: LHS design, then GP/EI
/// selection over the actions with no live window sample and none taken at
/// the present state, accept on g < 0, stop when EI (in loss units) falls
/// below c. Uses the library GP and EI; the loop, the window and the
/// optimiser are re-implemented here.
std::vector<TraceStep> reference_stage(std::span<const corrattack::ActionSpec> actions,
                                       std::span<const corrattack::Feature> features, int grid_h,
                                       int grid_w, const corrattack::StageParams& params,
                                       bool consume_on_accept, std::mt19937_64& rng,
                                       corrattack::BanditEnvironment& env);

}  // namespace oracle
