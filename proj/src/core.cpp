#include "endorse/core.hpp"

#include "endorse/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace endorse {

std::string_view to_string(ScoreKind kind) {
    switch (kind) {
    case ScoreKind::RootDegree:
        return "rootdegree";
    case ScoreKind::PageRank:
        return "pagerank";
    case ScoreKind::SpringRank:
        return "springrank";
    }
    return "unknown";
}

ScoreKind parse_score_kind(std::string_view name) {
    std::string key;
    for (char c : name) {
        if (c == '-' || c == '_')
            continue;
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (key == "rootdegree")
        return ScoreKind::RootDegree;
    if (key == "pagerank")
        return ScoreKind::PageRank;
    if (key == "springrank")
        return ScoreKind::SpringRank;
    throw ConfigError("unknown score function '" + std::string(name) +
                      "' (expected rootdegree, pagerank or springrank)");
}

namespace core {

EndorsementState::EndorsementState(Matrix a_in, std::int64_t t_in) : a(std::move(a_in)), t(t_in) {
    if (a.rows() != a.cols() || a.rows() < 2)
        throw ShapeError("endorsement matrix must be square with n >= 2, got " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
    if (!a.allFinite() || (a.array() < 0.0).any())
        throw DomainError("endorsement matrix entries must be finite and nonnegative");
    if (t < 0)
        throw DomainError("time index must be nonnegative");
}

void ModelParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw DomainError("lambda must lie in [0, 1]");
    if (!(alpha_p > 0.0 && alpha_p < 1.0))
        throw DomainError("alpha_p must lie in (0, 1)");
    if (!(alpha_s > 0.0))
        throw DomainError("alpha_s must be positive");
    if (m < 1)
        throw DomainError("m must be at least 1");
    if (static_cast<std::size_t>(beta.size()) != features.size())
        throw ConfigError("beta has " + std::to_string(beta.size()) + " entries but there are " +
                          std::to_string(features.size()) + " features");
    if (!beta.allFinite())
        throw DomainError("beta must be finite");
}

EndorsementState step(const EndorsementState& state, const Matrix& delta, double lambda) {
    if (delta.rows() != state.a.rows() || delta.cols() != state.a.cols())
        throw ShapeError("update matrix is " + std::to_string(delta.rows()) + "x" + std::to_string(delta.cols()) +
                         ", state is " + std::to_string(state.a.rows()) + "x" + std::to_string(state.a.cols()));
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw DomainError("lambda must lie in [0, 1]");
    if (!delta.allFinite() || (delta.array() < 0.0).any())
        throw DomainError("update matrix entries must be finite and nonnegative");
    EndorsementState next;
    next.a = lambda * state.a + (1.0 - lambda) * delta;
    next.t = state.t + 1;
    return next;
}

void require_row_stochastic(const Matrix& p, double tol) {
    if (p.rows() != p.cols() || p.rows() == 0)
        throw ShapeError("choice matrix must be square and nonempty");
    if (!p.allFinite() || (p.array() < 0.0).any())
        throw DomainError("choice matrix entries must be finite and nonnegative");
    const Vector sums = p.rowwise().sum();
    for (Eigen::Index i = 0; i < sums.size(); ++i)
        if (std::abs(sums(i) - 1.0) > tol)
            throw DomainError("row " + std::to_string(i) + " of the choice matrix sums to " +
                              std::to_string(sums(i)));
}

RankVector rank_vector(const Matrix& p) {
    require_row_stochastic(p);
    const double n = static_cast<double>(p.rows());
    return RankVector{p.colwise().sum().transpose() / n};
}

RateMatrix rate_matrix(const Matrix& p) {
    require_row_stochastic(p);
    return RateMatrix{p / static_cast<double>(p.rows())};
}

} // namespace core
} // namespace endorse
