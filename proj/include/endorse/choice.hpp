#pragma once

#include "endorse/features.hpp"
#include "endorse/rng.hpp"
#include "endorse/types.hpp"

#include <vector>

namespace endorse::choice {

/// Row-stochastic matrix of multinomial-logit choice probabilities.
struct ChoiceProbabilities {
    Matrix p;

    Eigen::Index n() const { return p.rows(); }
};

/// u_ij = sum_l beta_l * phi^l_ij(s).
Matrix utility(const Vector& s, const Vector& beta, const std::vector<FeatureMap>& features);

/**
 * Row-wise softmax of u, stabilized by subtracting each row maximum.
 * With `mask_diagonal` the self-endorsement j = i is removed and rows renormalized.
 */
ChoiceProbabilities choice_probabilities(const Matrix& u, bool mask_diagonal = false);

/// Convenience: choice_probabilities(utility(s, beta, features), mask_diagonal).
ChoiceProbabilities choice_probabilities(const Vector& s, const Vector& beta,
                                         const std::vector<FeatureMap>& features,
                                         bool mask_diagonal = false);

/**
 * Draws m independent endorsements. Each picks an endorser i uniformly at
 * random and an endorsee j with probability p_ij, so the result is
 * Multinomial(m, G) over the n^2 cells with G_ij = p_ij / n.
 */
Matrix sample_delta(const ChoiceProbabilities& p, int m, Rng& rng);

/**
 * Derivatives of the rate matrix G(s) = p(s) / n with respect to each score:
 * result[k] = dG / ds_k (n x n). Uses analytic feature gradients when present.
 */
std::vector<Matrix> rate_matrix_derivatives(const Vector& s, const Vector& beta,
                                            const std::vector<FeatureMap>& features,
                                            bool mask_diagonal = false);

/// d gamma / ds, where gamma_j = n^-1 sum_i p_ij. Entry (j, k) = d gamma_j / d s_k.
Matrix rank_jacobian(const Vector& s, const Vector& beta, const std::vector<FeatureMap>& features,
                     bool mask_diagonal = false);

} // namespace endorse::choice
