#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "corrattack/acquisition.hpp"
#include "corrattack/lhs.hpp"

namespace oracle {

Matrix gauss_jordan_inverse(Matrix a) {
    const std::size_t n = a.size();
    Matrix inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0) throw std::runtime_error("singular matrix");
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        const double d = a[col][col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

double matern52(const std::array<double, 4>& a, const std::array<double, 4>& b,
                const std::array<double, 4>& lengthscales, double outputscale) {
    double r2 = 0.0;
    for (int d = 0; d < 4; ++d) {
        const double t = (a[d] - b[d]) / lengthscales[d];
        r2 += t * t;
    }
    const double r = std::sqrt(r2);
    return outputscale * (1.0 + std::sqrt(5.0) * r + 5.0 * r2 / 3.0) * std::exp(-std::sqrt(5.0) * r);
}

Posterior dense_posterior(const std::vector<std::array<double, 4>>& z, std::span<const double> y,
                          const corrattack::gp::GpHyperparams& hp,
                          const std::array<double, 4>& query) {
    const std::size_t n = z.size();
    Matrix k(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            k[i][j] = matern52(z[i], z[j], hp.lengthscales, hp.outputscale) +
                      (i == j ? hp.noise_variance : 0.0);
    const Matrix kinv = gauss_jordan_inverse(k);
    std::vector<double> ks(n);
    for (std::size_t i = 0; i < n; ++i) ks[i] = matern52(z[i], query, hp.lengthscales, hp.outputscale);

    Posterior p;
    p.mean = hp.mean_constant;
    p.variance = hp.outputscale;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            p.mean += ks[i] * kinv[i][j] * (y[j] - hp.mean_constant);
            p.variance -= ks[i] * kinv[i][j] * ks[j];
        }
    return p;
}

double monte_carlo_ei(double mean, double sigma, double best, std::size_t draws,
                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t pairs = draws / 2;
    double acc = 0.0;
    for (std::size_t s = 0; s < pairs; ++s) {
        const double e = normal(rng);
        acc += std::max(0.0, best - (mean + sigma * e));
        acc += std::max(0.0, best - (mean - sigma * e));
    }
    return acc / static_cast<double>(2 * pairs);
}

std::vector<double> AdamReference::step(std::vector<double> theta, const std::vector<double>& grad) {
    if (m.empty()) {
        m.assign(theta.size(), 0.0);
        v.assign(theta.size(), 0.0);
    }
    ++t;
    for (std::size_t p = 0; p < theta.size(); ++p) {
        m[p] = beta1 * m[p] + (1.0 - beta1) * grad[p];
        v[p] = beta2 * v[p] + (1.0 - beta2) * grad[p] * grad[p];
        const double mh = m[p] / (1.0 - std::pow(beta1, t));
        const double vh = v[p] / (1.0 - std::pow(beta2, t));
        theta[p] += lr * mh / (std::sqrt(vh) + eps);
    }
    return theta;
}

std::vector<double> pca_scores_eigen(const corrattack::Image& natural,
                                     const corrattack::BlockGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.block_count());
    const int b = grid.block_size;
    Eigen::MatrixXd x(n, b * b);
    for (Eigen::Index l = 0; l < n; ++l) {
        const auto blk = grid.block_at(static_cast<std::size_t>(l));
        for (int r = 0; r < b; ++r)
            for (int c = 0; c < b; ++c)
                x(l, r * b + c) = natural.at(blk.k, blk.i * b + r, blk.j * b + c);
    }
    x.rowwise() -= x.colwise().mean();
    const Eigen::MatrixXd cov = x.transpose() * x / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    Eigen::VectorXd dir = solver.eigenvectors().col(cov.rows() - 1);
    Eigen::Index big = 0;
    dir.cwiseAbs().maxCoeff(&big);
    if (dir(big) < 0) dir = -dir;
    const Eigen::VectorXd scores = x * dir;
    const double lo = scores.minCoeff();
    const double hi = scores.maxCoeff();
    std::vector<double> out(static_cast<std::size_t>(n), 0.5);
    if (hi - lo > 0)
        for (Eigen::Index l = 0; l < n; ++l) out[l] = (scores(l) - lo) / (hi - lo);
    return out;
}

namespace {

struct Entry {
    corrattack::BlockIndex block;
    corrattack::gp::FeatureVec z;
    double g;
};

}  // namespace

std::vector<TraceStep> reference_stage(std::span<const corrattack::ActionSpec> actions,
                                       std::span<const corrattack::Feature> features, int grid_h,
                                       int grid_w, const corrattack::StageParams& params,
                                       bool consume_on_accept, std::mt19937_64& rng,
                                       corrattack::BanditEnvironment& env) {
    using namespace corrattack;
    std::vector<TraceStep> trace;
    std::deque<Entry> window;
    std::vector<bool> consumed(actions.size(), false);
    std::vector<long> seen(actions.size(), -1);
    long version = 0;

    auto insert = [&](std::size_t a, double g) {
        window.push_back({actions[a].block, features[a].vec(), g});
        while (window.size() > params.window) window.pop_front();
    };
    auto in_window = [&](const BlockIndex& b) {
        for (const Entry& e : window)
            if (e.block == b) return true;
        return false;
    };

    for (std::size_t a : latin_hypercube_init(actions, grid_h, grid_w, params.initial_samples, rng)) {
        const StageEvaluation ev = env.evaluate(a);
        trace.push_back({a, ev.g, false});
        seen[a] = version;
        insert(a, ev.g);
        if (ev.halt) return trace;
    }

    gp::GpHyperparams hp = gp::GpHyperparams::initial();
    AdamReference adam;
    for (;;) {
        std::vector<std::size_t> cand;
        for (std::size_t a = 0; a < actions.size(); ++a)
            if (!consumed[a] && seen[a] != version && !in_window(actions[a].block)) cand.push_back(a);
        if (cand.empty()) return trace;

        std::vector<gp::FeatureVec> z;
        std::vector<double> raw;
        for (const Entry& e : window) {
            z.push_back(e.z);
            raw.push_back(e.g);
        }
        const gp::GpDataset data = gp::GpDataset::standardize(z, raw);
        if (data.size() >= 2) {
            const auto grad = gp::log_marginal_likelihood_with_gradient(hp, data).gradient;
            const auto p = hp.to_params();
            const auto next = adam.step(std::vector<double>(p.begin(), p.end()),
                                        std::vector<double>(grad.begin(), grad.end()));
            gp::GpHyperparams::ParamVec q{};
            std::copy(next.begin(), next.end(), q.begin());
            hp = gp::GpHyperparams::from_params(q);
            hp.clamp_to_bounds();
        }
        const gp::GpModel model(hp, data);
        double best = 0.0;
        if (!data.empty()) best = *std::min_element(data.values().begin(), data.values().end());

        std::size_t pick = cand.front();
        double pick_ei = -1.0;
        for (std::size_t a : cand) {
            const auto post = model.predict(features[a].vec());
            const double ei = expected_improvement(post.mean, post.variance, best);
            if (ei > pick_ei) {
                pick_ei = ei;
                pick = a;
            }
        }
        if (pick_ei * data.raw_std() < params.ei_threshold) return trace;

        const StageEvaluation ev = env.evaluate(pick);
        seen[pick] = version;
        if (ev.halt) {
            trace.push_back({pick, ev.g, false});
            return trace;
        }
        const bool accepted = ev.g < 0.0;
        trace.push_back({pick, ev.g, accepted});
        if (accepted) {
            env.accept(pick);
            ++version;
            if (consume_on_accept) consumed[pick] = true;
            const BlockIndex& b = actions[pick].block;
            std::erase_if(window, [&](const Entry& e) {
                return std::abs(e.block.i - b.i) + std::abs(e.block.j - b.j) <= params.alpha;
            });
            while (window.size() > params.window) window.pop_front();
        } else {
            insert(pick, ev.g);
        }
    }
}

}  // namespace oracle
