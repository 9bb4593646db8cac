#include "endorse/features.hpp"

#include "endorse/errors.hpp"

#include <cmath>

namespace endorse::choice {

FeatureMap linear_prestige() {
    FeatureMap f;
    f.id = "prestige";
    f.eval = [](const Vector& s) -> Matrix {
        const auto n = s.size();
        return s.transpose().replicate(n, 1);
    };
    f.grad = [](const Vector& s) {
        const auto n = s.size();
        return FeatureGradient(static_cast<std::size_t>(n), Matrix::Identity(n, n));
    };
    return f;
}

FeatureMap quadratic_proximity() {
    FeatureMap f;
    f.id = "proximity";
    f.eval = [](const Vector& s) -> Matrix {
        const auto n = s.size();
        Matrix phi(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const double d = s(i) - s(j);
                phi(i, j) = d * d;
            }
        return phi;
    };
    f.grad = [](const Vector& s) {
        const auto n = s.size();
        FeatureGradient g(static_cast<std::size_t>(n), Matrix::Zero(n, n));
        for (Eigen::Index i = 0; i < n; ++i) {
            Matrix& gi = g[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < n; ++j) {
                const double d = 2.0 * (s(i) - s(j));
                gi(j, i) += d;
                gi(j, j) -= d;
            }
        }
        return g;
    };
    return f;
}

FeatureMap composed_with_sqrt(const FeatureMap& inner) {
    FeatureMap f;
    f.id = "sqrt-" + inner.id;
    auto root = [](const Vector& d) -> Vector {
        if ((d.array() < 0.0).any())
            throw DomainError("square-root feature evaluated at a negative in-degree");
        return d.cwiseSqrt();
    };
    f.eval = [inner, root](const Vector& d) { return inner.eval(root(d)); };
    if (inner.has_gradient()) {
        f.grad = [inner, root](const Vector& d) {
            const Vector r = root(d);
            FeatureGradient g = inner.grad(r);
            // chain rule: d sqrt(d_k) / d d_k = 1 / (2 sqrt(d_k))
            const Vector scale = (0.5 / r.array()).matrix();
            for (auto& gi : g)
                gi = gi * scale.asDiagonal();
            return g;
        };
    }
    return f;
}

std::vector<FeatureMap> canonical_features() { return {linear_prestige(), quadratic_proximity()}; }

std::vector<FeatureMap> root_degree_features() {
    return {composed_with_sqrt(linear_prestige()), composed_with_sqrt(quadratic_proximity())};
}

FeatureGradient finite_difference_gradient(const FeatureMap& feature, const Vector& s) {
    const auto n = s.size();
    FeatureGradient g(static_cast<std::size_t>(n), Matrix::Zero(n, n));
    Vector probe = s;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double h = 1e-5 * (1.0 + std::abs(s(k)));
        probe(k) = s(k) + h;
        const Matrix up = feature.eval(probe);
        probe(k) = s(k) - h;
        const Matrix down = feature.eval(probe);
        probe(k) = s(k);
        const Matrix diff = (up - down) / (2.0 * h);
        for (Eigen::Index i = 0; i < n; ++i)
            g[static_cast<std::size_t>(i)].col(k) = diff.row(i).transpose();
    }
    return g;
}

FeatureGradient gradient(const FeatureMap& feature, const Vector& s) {
    return feature.has_gradient() ? feature.grad(s) : finite_difference_gradient(feature, s);
}

} // namespace endorse::choice
