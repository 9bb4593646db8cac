#include "endorse/sim.hpp"

#include "endorse/choice.hpp"
#include "endorse/errors.hpp"
#include "endorse/parallel.hpp"
#include "endorse/rng.hpp"
#include "endorse/scores.hpp"

#include <string>

namespace endorse::sim {

Matrix uniform_initial_state(int n, int m) {
    if (n < 2)
        throw DomainError("n must be at least 2");
    if (m < 1)
        throw DomainError("m must be at least 1");
    return Matrix::Constant(n, n, static_cast<double>(m) / (static_cast<double>(n) * n));
}

Matrix random_initial_state(int n, int m, std::uint64_t seed) {
    if (n < 2)
        throw DomainError("n must be at least 2");
    if (m < 1)
        throw DomainError("m must be at least 1");
    Rng rng(seed, 0);
    Matrix a = Matrix::Zero(n, n);
    const auto cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    for (int k = 0; k < m; ++k) {
        const std::size_t c = rng.index(cells);
        a(static_cast<Eigen::Index>(c / n), static_cast<Eigen::Index>(c % n)) += 1.0;
    }
    return a;
}

Trajectory run(const core::ModelParams& params, const Matrix& a0, int steps, RecordOptions record) {
    params.validate();
    if (steps < 0)
        throw DomainError("steps must be nonnegative");
    core::EndorsementState state(a0);
    const auto n = state.n();
    const auto sigma = scores::make_score_function(params.score_kind, params.alpha_p, params.alpha_s);

    Trajectory traj;
    traj.params = params;
    traj.seed = params.seed;
    traj.a0 = a0;
    traj.gamma.resize(steps, n);
    if (record.scores)
        traj.scores.resize(steps, n);
    if (record.deltas)
        traj.deltas.reserve(static_cast<std::size_t>(steps));

    for (int t = 0; t < steps; ++t) {
        Vector s;
        try {
            s = (*sigma)(state.a);
        } catch (const NumericError& e) {
            throw NumericError("step " + std::to_string(t) + ": " + e.what());
        }
        const auto p = choice::choice_probabilities(s, params.beta, params.features, params.mask_diagonal);
        traj.gamma.row(t) = p.p.colwise().sum() / static_cast<double>(n);
        if (record.scores)
            traj.scores.row(t) = s.transpose();
        Rng rng = Rng::for_step(params.seed, static_cast<std::uint64_t>(t));
        Matrix delta = choice::sample_delta(p, params.m, rng);
        state.a = params.lambda * state.a + (1.0 - params.lambda) * delta;
        ++state.t;
        if (record.deltas)
            traj.deltas.push_back(std::move(delta));
    }
    traj.a_final = state.a;
    return traj;
}

namespace {

Eigen::Index window_start(const Trajectory& traj, int window) {
    if (window < 1)
        throw DomainError("window must be positive");
    if (window > traj.steps())
        throw DomainError("window of " + std::to_string(window) + " exceeds the " +
                          std::to_string(traj.steps()) + " recorded steps");
    return traj.steps() - window;
}

} // namespace

Vector mean_rank(const Trajectory& traj, int window) {
    const auto start = window_start(traj, window);
    return traj.gamma.bottomRows(traj.steps() - start).colwise().mean().transpose();
}

double rank_variance(const Trajectory& traj, int window) {
    const auto start = window_start(traj, window);
    const auto block = traj.gamma.bottomRows(traj.steps() - start);
    const double mean = block.mean();
    return (block.array() - mean).square().mean();
}

std::vector<SweepCell> variance_sweep(const core::ModelParams& base, const Matrix& a0, int steps, int window,
                                      std::span<const double> beta1_grid, std::span<const double> beta2_grid) {
    if (base.beta.size() < 2)
        throw ConfigError("variance sweeps need at least two preference parameters");
    std::vector<SweepCell> cells(beta1_grid.size() * beta2_grid.size());
    parallel_for(cells.size(), [&](std::size_t c) {
        core::ModelParams params = base;
        params.beta(0) = beta1_grid[c / beta2_grid.size()];
        params.beta(1) = beta2_grid[c % beta2_grid.size()];
        params.seed = mix_seed(base.seed, c);
        const Trajectory traj = run(params, a0, steps);
        cells[c] = SweepCell{params.beta(0), params.beta(1), rank_variance(traj, window)};
    });
    return cells;
}

} // namespace endorse::sim
