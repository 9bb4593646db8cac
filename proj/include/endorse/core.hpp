#pragma once

#include "endorse/features.hpp"
#include "endorse/types.hpp"

#include <cstdint>
#include <vector>

namespace endorse::core {

/// Remembered endorsement weights: a(i, j) is the decayed count of endorsements i -> j.
struct EndorsementState {
    Matrix a;
    std::int64_t t = 0;

    EndorsementState() = default;
    /// Throws ShapeError unless a is square with n >= 2, DomainError on negative or non-finite entries.
    explicit EndorsementState(Matrix a, std::int64_t t = 0);

    Eigen::Index n() const { return a.rows(); }
};

struct ModelParams {
    double lambda = 0.995;
    Vector beta = Vector::Zero(2);
    int m = 1;
    ScoreKind score_kind = ScoreKind::SpringRank;
    double alpha_p = 0.85;
    double alpha_s = 1e-8;
    std::uint64_t seed = 0;
    /// Paired with beta entry by entry.
    std::vector<choice::FeatureMap> features = choice::canonical_features();
    /// Exclude self-endorsements from the choice set.
    bool mask_diagonal = false;

    /// Throws DomainError/ConfigError on out-of-range values.
    void validate() const;
};

/// g_ij = p_ij / n; expected share of one step's endorsements on each cell.
struct RateMatrix {
    Matrix g;
};

/// gamma_j = n^-1 sum_i p_ij; probability that a new endorsement flows to j.
struct RankVector {
    Vector gamma;
};

/// a' = lambda * a + (1 - lambda) * delta, t' = t + 1.
EndorsementState step(const EndorsementState& state, const Matrix& delta, double lambda);

RankVector rank_vector(const Matrix& p);
RateMatrix rate_matrix(const Matrix& p);

/// Throws DomainError unless every row of p is nonnegative and sums to 1 within tol.
void require_row_stochastic(const Matrix& p, double tol = 1e-9);

} // namespace endorse::core
