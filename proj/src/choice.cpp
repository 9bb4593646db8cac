#include "endorse/choice.hpp"

#include "endorse/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace endorse::choice {

Matrix utility(const Vector& s, const Vector& beta, const std::vector<FeatureMap>& features) {
    if (static_cast<std::size_t>(beta.size()) != features.size())
        throw ConfigError("beta has " + std::to_string(beta.size()) + " entries but there are " +
                          std::to_string(features.size()) + " features");
    const auto n = s.size();
    Matrix u = Matrix::Zero(n, n);
    for (std::size_t l = 0; l < features.size(); ++l) {
        const double b = beta(static_cast<Eigen::Index>(l));
        if (b != 0.0)
            u += b * features[l].eval(s);
    }
    return u;
}

ChoiceProbabilities choice_probabilities(const Matrix& u, bool mask_diagonal) {
    if (u.rows() != u.cols())
        throw ShapeError("utility matrix must be square");
    if (!u.allFinite())
        throw DomainError("utilities must be finite");
    const auto n = u.rows();
    if (mask_diagonal && n < 2)
        throw DomainError("masking the diagonal needs n >= 2");
    Matrix p(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double row_max = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j)
            if (!(mask_diagonal && i == j))
                row_max = std::max(row_max, u(i, j));
        double total = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double w = (mask_diagonal && i == j) ? 0.0 : std::exp(u(i, j) - row_max);
            p(i, j) = w;
            total += w;
        }
        p.row(i) /= total;
    }
    return ChoiceProbabilities{std::move(p)};
}

ChoiceProbabilities choice_probabilities(const Vector& s, const Vector& beta,
                                         const std::vector<FeatureMap>& features, bool mask_diagonal) {
    return choice_probabilities(utility(s, beta, features), mask_diagonal);
}

Matrix sample_delta(const ChoiceProbabilities& probs, int m, Rng& rng) {
    if (m < 1)
        throw DomainError("m must be at least 1, got " + std::to_string(m));
    const auto n = probs.n();
    Matrix delta = Matrix::Zero(n, n);
    for (int draw = 0; draw < m; ++draw) {
        const auto i = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
        const double target = rng.uniform();
        double cumulative = 0.0;
        Eigen::Index pick = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (probs.p(i, j) <= 0.0)
                continue;
            cumulative += probs.p(i, j);
            pick = j;
            if (target < cumulative)
                break;
        }
        delta(i, pick) += 1.0;
    }
    return delta;
}

std::vector<Matrix> rate_matrix_derivatives(const Vector& s, const Vector& beta,
                                            const std::vector<FeatureMap>& features, bool mask_diagonal) {
    const auto n = s.size();
    const Matrix p = choice_probabilities(s, beta, features, mask_diagonal).p;

    // du[i](j, k) = d u_ij / d s_k
    std::vector<Matrix> du(static_cast<std::size_t>(n), Matrix::Zero(n, n));
    for (std::size_t l = 0; l < features.size(); ++l) {
        const double b = beta(static_cast<Eigen::Index>(l));
        if (b == 0.0)
            continue;
        const FeatureGradient g = gradient(features[l], s);
        for (std::size_t i = 0; i < du.size(); ++i)
            du[i] += b * g[i];
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<Matrix> dG(static_cast<std::size_t>(n), Matrix::Zero(n, n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const Matrix& dui = du[static_cast<std::size_t>(i)];
        const Eigen::RowVectorXd mean = p.row(i) * dui;   // sum_j p_ij du_ij/ds_k
        for (Eigen::Index k = 0; k < n; ++k) {
            Matrix& dk = dG[static_cast<std::size_t>(k)];
            for (Eigen::Index j = 0; j < n; ++j)
                dk(i, j) = inv_n * p(i, j) * (dui(j, k) - mean(k));
        }
    }
    return dG;
}

Matrix rank_jacobian(const Vector& s, const Vector& beta, const std::vector<FeatureMap>& features,
                     bool mask_diagonal) {
    const auto dG = rate_matrix_derivatives(s, beta, features, mask_diagonal);
    const auto n = s.size();
    Matrix jac(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        jac.col(k) = dG[static_cast<std::size_t>(k)].colwise().sum().transpose();
    return jac;
}

} // namespace endorse::choice
