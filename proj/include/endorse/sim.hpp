#pragma once

#include "endorse/core.hpp"
#include "endorse/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace endorse::sim {

struct RecordOptions {
    bool scores = false;
    bool deltas = false;
};

/// Output of one simulation run. Row t of `gamma` is the rank vector that generated step t.
struct Trajectory {
    Matrix gamma;               // steps x n
    Matrix scores;              // steps x n, empty unless recorded
    std::vector<Matrix> deltas; // empty unless recorded
    Matrix a0;
    Matrix a_final;
    core::ModelParams params;
    std::uint64_t seed = 0;

    Eigen::Index steps() const { return gamma.rows(); }
    Eigen::Index n() const { return a_final.rows(); }
};

/// (m / n^2) E: uniform start carrying the stationary total weight m.
Matrix uniform_initial_state(int n, int m);

/// m endorsements drawn uniformly over all n^2 cells.
Matrix random_initial_state(int n, int m, std::uint64_t seed);

/**
 * Iterates score -> utilities -> choice probabilities -> sampled update ->
 * state update for `steps` steps. Step t draws from Rng::for_step(params.seed, t),
 * so identical inputs give bit-identical trajectories.
 */
Trajectory run(const core::ModelParams& params, const Matrix& a0, int steps, RecordOptions record = {});

/// Mean of gamma over the final `window` steps.
Vector mean_rank(const Trajectory& traj, int window = 500);

/// Population variance of all gamma entries pooled over the final `window` steps.
double rank_variance(const Trajectory& traj, int window = 500);

struct SweepCell {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double variance = 0.0;
};

/**
 * Rank variance over a (beta1, beta2) grid. Cell c uses seed mix_seed(base.seed, c);
 * results are ordered beta1-major regardless of thread scheduling.
 */
std::vector<SweepCell> variance_sweep(const core::ModelParams& base, const Matrix& a0, int steps, int window,
                                      std::span<const double> beta1_grid, std::span<const double> beta2_grid);

} // namespace endorse::sim
