#include "corrattack/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "corrattack/simd/kernels.hpp"

namespace corrattack {

std::vector<ActionSpec> make_action_set(ActionMode mode, const BlockGrid& grid,
                                        const Image& perturbation, double epsilon, double eta) {
    std::vector<ActionSpec> actions;
    actions.reserve(grid.block_count());
    for (std::size_t l = 0; l < grid.block_count(); ++l) {
        const BlockIndex b = grid.block_at(l);
        switch (mode) {
            case ActionMode::Diff:
                actions.push_back({ActionKind::Diff, b, eta});
                break;
            case ActionMode::FlipNegativePass:
                if (block_sum(perturbation, grid, b) < 0.0)
                    actions.push_back({ActionKind::FlipToPos, b, 2.0 * epsilon});
                break;
            case ActionMode::FlipPositivePass:
                if (block_sum(perturbation, grid, b) > 0.0)
                    actions.push_back({ActionKind::FlipToNeg, b, 2.0 * epsilon});
                break;
        }
    }
    return actions;
}

std::vector<double> pca_first_component(const Image& natural, const BlockGrid& grid) {
    if (grid.h * grid.block_size != natural.height() ||
        grid.w * grid.block_size != natural.width() || grid.c != natural.channels())
        throw std::invalid_argument("pca_first_component: grid does not match image");

    const std::size_t n = grid.block_count();
    const int b = grid.block_size;
    const std::size_t p = static_cast<std::size_t>(b) * b;

    // Row l holds block l flattened row-major, centred across blocks.
    std::vector<double> x(n * p);
    for (std::size_t l = 0; l < n; ++l) {
        const BlockIndex blk = grid.block_at(l);
        for (int r = 0; r < b; ++r)
            for (int c = 0; c < b; ++c)
                x[l * p + r * b + c] = natural.at(blk.k, blk.i * b + r, blk.j * b + c);
    }
    std::vector<double> mean(p, 0.0);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t q = 0; q < p; ++q) mean[q] += x[l * p + q];
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t q = 0; q < p; ++q) x[l * p + q] -= mean[q];

    const auto& k = simd::active();
    std::vector<double> scores(n, 0.0);
    auto project = [&](const std::vector<double>& v) {
        for (std::size_t l = 0; l < n; ++l) scores[l] = k.dot(&x[l * p], v.data(), p);
    };

    // Scatter matrix on the smaller side: X X^T (n x n) or X^T X (p x p).
    const bool gram = n < p;
    const std::size_t d = gram ? n : p;
    std::vector<double> rows;
    if (gram) {
        rows = x;
    } else {
        rows.resize(p * n);
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t q = 0; q < p; ++q) rows[q * n + l] = x[l * p + q];
    }
    const std::size_t len = gram ? p : n;
    std::vector<double> scatter(d * d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b2 = a; b2 < d; ++b2)
            scatter[a * d + b2] = scatter[b2 * d + a] = k.dot(&rows[a * len], &rows[b2 * len], len);

    auto trace = [d](const std::vector<double>& m) {
        double t = 0.0;
        for (std::size_t a = 0; a < d; ++a) t += m[a * d + a];
        return t;
    };
    const double t0 = trace(scatter);
    if (!(t0 > 1e-300)) return std::vector<double>(n, 0.5);

    // Repeated squaring drives M / tr(M) towards the leading projector.
    std::vector<double> m(scatter), sq(d * d);
    for (double& e : m) e /= t0;
    for (int iter = 0; iter < 60; ++iter) {
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b2 = a; b2 < d; ++b2)
                sq[a * d + b2] = sq[b2 * d + a] = k.dot(&m[a * d], &m[b2 * d], d);
        const double t = trace(sq);
        if (!(t > 1e-300)) break;
        double change = 0.0;
        for (std::size_t e = 0; e < d * d; ++e) {
            sq[e] /= t;
            change = std::max(change, std::fabs(sq[e] - m[e]));
        }
        m.swap(sq);
        if (change < 1e-15) break;
    }

    std::size_t col = 0;
    for (std::size_t a = 1; a < d; ++a)
        if (m[a * d + a] > m[col * d + col]) col = a;
    std::vector<double> u(d), next(d);
    for (std::size_t a = 0; a < d; ++a) u[a] = m[a * d + col];
    // Polish against the unsquared matrix.
    for (int iter = 0; iter < 3; ++iter) {
        for (std::size_t a = 0; a < d; ++a) next[a] = k.dot(&scatter[a * d], u.data(), d);
        const double norm = std::sqrt(k.dot(next.data(), next.data(), d));
        if (!(norm > 1e-300)) return std::vector<double>(n, 0.5);
        for (std::size_t a = 0; a < d; ++a) u[a] = next[a] / norm;
    }

    std::vector<double> v(p, 0.0);
    if (gram) {
        for (std::size_t l = 0; l < n; ++l) k.axpy(u[l], &x[l * p], v.data(), p);
        const double norm = std::sqrt(k.dot(v.data(), v.data(), p));
        if (!(norm > 1e-300)) return std::vector<double>(n, 0.5);
        for (double& e : v) e /= norm;
    } else {
        v = u;
    }

    std::size_t lead = 0;
    for (std::size_t q = 1; q < p; ++q)
        if (std::fabs(v[q]) > std::fabs(v[lead])) lead = q;
    if (v[lead] < 0.0)
        for (double& e : v) e = -e;

    project(v);
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const double min = *lo;
    const double range = *hi - *lo;
    if (!(range > 1e-12)) return std::vector<double>(n, 0.5);
    for (double& s : scores) s = (s - min) / range;
    return scores;
}

std::vector<Feature> make_features(const BlockGrid& grid, std::span<const double> pca_scores) {
    if (pca_scores.size() != grid.block_count())
        throw std::invalid_argument("make_features: one pca score per block required");
    auto norm = [](int v, int extent) {
        return extent > 1 ? static_cast<double>(v) / (extent - 1) : 0.0;
    };
    std::vector<Feature> out(grid.block_count());
    for (std::size_t l = 0; l < out.size(); ++l) {
        const BlockIndex b = grid.block_at(l);
        out[l] = {norm(b.i, grid.h), norm(b.j, grid.w), norm(b.k, grid.c), pca_scores[l]};
    }
    return out;
}

namespace {

Image stepped(const Image& x_t, const Image& origin, double epsilon, const BlockGrid& grid,
              const BlockIndex& block, double amount) {
    Image moved = x_t;
    add_block_delta(moved, grid, block, amount);
    return project_ball(moved, origin, epsilon);
}

}  // namespace

DifferenceResult evaluate_difference(LossOracle& oracle, const Image& x_t, double current_loss,
                                     const Image& origin, double epsilon,
                                     const BlockGrid& grid, const ActionSpec& action) {
    DifferenceResult out;
    if (action.kind != ActionKind::Diff) {
        out.step = action.flip_amount();
        out.candidate = stepped(x_t, origin, epsilon, grid, action.block, out.step);
        const LossEvaluation e = oracle.evaluate(out.candidate);
        out.queries = 1;
        out.candidate_loss = e.loss;
        out.success = e.success;
        out.g = e.loss - current_loss;
        return out;
    }

    Image plus = stepped(x_t, origin, epsilon, grid, action.block, action.magnitude);
    const LossEvaluation ep = oracle.evaluate(plus);
    out.queries = 1;
    if (ep.success) {
        out.step = action.magnitude;
        out.candidate = std::move(plus);
        out.candidate_loss = ep.loss;
        out.g = ep.loss - current_loss;
        out.success = true;
        return out;
    }
    Image minus = stepped(x_t, origin, epsilon, grid, action.block, -action.magnitude);
    const LossEvaluation em = oracle.evaluate(minus);
    out.queries = 2;
    if (em.success || em.loss < ep.loss) {
        out.step = -action.magnitude;
        out.candidate = std::move(minus);
        out.candidate_loss = em.loss;
        out.success = em.success;
    } else {
        out.step = action.magnitude;
        out.candidate = std::move(plus);
        out.candidate_loss = ep.loss;
    }
    out.g = out.candidate_loss - current_loss;
    return out;
}

bool SampleSet::contains(const BlockIndex& block) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const SampleEntry& e) { return e.block == block; });
}

void SampleSet::update(bool accepted, const BlockIndex& block, const Feature& feature, double g,
                       int alpha) {
    if (accepted) {
        std::erase_if(entries_, [&](const SampleEntry& e) {
            return std::abs(e.block.i - block.i) + std::abs(e.block.j - block.j) <= alpha;
        });
    } else {
        entries_.push_back({feature, block, g, next_birth_++});
    }
    while (entries_.size() > capacity_) entries_.pop_front();
}

gp::GpDataset SampleSet::dataset() const {
    std::vector<gp::FeatureVec> z;
    std::vector<double> g;
    z.reserve(entries_.size());
    g.reserve(entries_.size());
    for (const auto& e : entries_) {
        z.push_back(e.feature.vec());
        g.push_back(e.g);
    }
    return gp::GpDataset::standardize(std::move(z), g);
}

SampleSet update_samples(SampleSet window, bool accepted, const BlockIndex& block,
                         const Feature& feature, double g, int alpha) {
    window.update(accepted, block, feature, g, alpha);
    return window;
}

}  // namespace corrattack
