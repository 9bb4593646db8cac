#pragma once

#include "endorse/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace endorse::choice {

/// Derivative of a feature map: entry [i](j, k) is d phi_ij / d s_k.
using FeatureGradient = std::vector<Matrix>;

/**
 * A smooth map from a score vector to an n x n feature matrix. Utilities are
 * linear combinations u = sum_l beta_l * phi^l(s).
 *
 * `grad` is optional; when empty, callers fall back to central differences.
 */
struct FeatureMap {
    std::string id;
    std::function<Matrix(const Vector&)> eval;
    std::function<FeatureGradient(const Vector&)> grad;

    bool has_gradient() const { return static_cast<bool>(grad); }
};

/// phi_ij = s_j
FeatureMap linear_prestige();

/// phi_ij = (s_i - s_j)^2
FeatureMap quadratic_proximity();

/// phi(sqrt(d)) for a feature phi of the scores; d must be nonnegative.
FeatureMap composed_with_sqrt(const FeatureMap& inner);

/// {linear_prestige, quadratic_proximity}, paired with (beta1, beta2).
std::vector<FeatureMap> canonical_features();

/// Canonical features evaluated on sqrt of the in-degree. Used when the
/// in-degree itself is the state variable.
std::vector<FeatureMap> root_degree_features();

/// Central differences with step 1e-5 * (1 + |s_k|).
FeatureGradient finite_difference_gradient(const FeatureMap& feature, const Vector& s);

/// Analytic gradient when available, finite differences otherwise.
FeatureGradient gradient(const FeatureMap& feature, const Vector& s);

} // namespace endorse::choice
