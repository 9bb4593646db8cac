#pragma once

#include "endorse/types.hpp"

#include <memory>
#include <optional>
#include <string>

namespace endorse::scores {

/// Received weight per node: d_in(i) = sum_j a(j, i).
Vector in_degree(const Matrix& a);
/// Given weight per node: d_out(i) = sum_j a(i, j).
Vector out_degree(const Matrix& a);

/// s_i = sqrt(weight received by i).
Vector root_degree_score(const Matrix& a);

struct PageRankOptions {
    double tol = 1e-12;        // L1 change between iterates
    int max_iterations = 100000;
};

/// Column-stochastic transition a^T (D_out)^-1; columns of zero out-degree nodes are uniform.
Matrix pagerank_transition(const Matrix& a);

/**
 * PageRank vector of a^T by power iteration on
 * alpha_p * W + (1 - alpha_p) / n * E, started from e / n, normalized to sum n.
 * Throws NumericError when the iteration does not converge.
 */
Vector pagerank_score(const Matrix& a, double alpha_p, const PageRankOptions& options = {});

/// Solution of [D_in + D_out - (a + a^T) + alpha_s I] s = (D_in - D_out) e.
Vector springrank_score(const Matrix& a, double alpha_s);

/// Unregularized Laplacian D_in + D_out - (a + a^T).
Matrix springrank_laplacian(const Matrix& a);

/**
 * Solver for (L + alpha I) x = b with L a graph Laplacian (L e = 0).
 *
 * Factorizes L + alpha I + E, which is well conditioned even for tiny alpha,
 * and treats the e-component of b separately using (L + alpha I) e = alpha e.
 */
class RegularizedLaplacianSolver {
  public:
    RegularizedLaplacianSolver(const Matrix& laplacian, double alpha);
    Vector solve(const Vector& b) const;
    /// Solve with the e-component of b dropped. Use when e^T b = 0 holds exactly in
    /// exact arithmetic; otherwise rounding in e^T b would be amplified by 1 / alpha.
    Vector solve_centered(const Vector& b) const;

  private:
    Eigen::LLT<Matrix> factor_;
    double alpha_;
};

/**
 * A score function sigma: A -> s. Implementations may provide the directional
 * derivative D sigma(a)[x]; stability routines fall back to finite
 * differences when they do not.
 */
class ScoreFunction {
  public:
    virtual ~ScoreFunction() = default;

    virtual std::string name() const = 0;
    virtual Vector operator()(const Matrix& a) const = 0;

    /// D sigma(a)[x] where s = sigma(a). Empty when no analytic form is implemented.
    virtual std::optional<Vector> derivative(const Matrix& /*a*/, const Vector& /*s*/,
                                             const Matrix& /*x*/) const {
        return std::nullopt;
    }
};

/// Weighted in-degree. The state variable of the Root-Degree model in the long-memory analysis.
class InDegreeScore final : public ScoreFunction {
  public:
    std::string name() const override { return "indegree"; }
    Vector operator()(const Matrix& a) const override { return in_degree(a); }
    std::optional<Vector> derivative(const Matrix& a, const Vector& s, const Matrix& x) const override;
};

class RootDegreeScore final : public ScoreFunction {
  public:
    std::string name() const override { return "rootdegree"; }
    Vector operator()(const Matrix& a) const override { return root_degree_score(a); }
    std::optional<Vector> derivative(const Matrix& a, const Vector& s, const Matrix& x) const override;
};

class PageRankScore final : public ScoreFunction {
  public:
    explicit PageRankScore(double alpha_p, PageRankOptions options = {});
    std::string name() const override { return "pagerank"; }
    Vector operator()(const Matrix& a) const override { return pagerank_score(a, alpha_, options_); }
    /// Requires every node to have positive out-degree (DomainError otherwise).
    std::optional<Vector> derivative(const Matrix& a, const Vector& s, const Matrix& x) const override;
    double alpha() const { return alpha_; }

  private:
    double alpha_;
    PageRankOptions options_;
};

class SpringRankScore final : public ScoreFunction {
  public:
    explicit SpringRankScore(double alpha_s);
    std::string name() const override { return "springrank"; }
    Vector operator()(const Matrix& a) const override { return springrank_score(a, alpha_); }
    std::optional<Vector> derivative(const Matrix& a, const Vector& s, const Matrix& x) const override;
    double alpha() const { return alpha_; }

  private:
    double alpha_;
};

/// The score function used by the simulation for a given kind.
std::shared_ptr<const ScoreFunction> make_score_function(ScoreKind kind, double alpha_p, double alpha_s);

/**
 * D sigma(a)[x]: analytic when the score function provides it, otherwise a
 * central difference (forward when a - h x leaves the nonnegative orthant).
 */
Vector directional_derivative(const ScoreFunction& sigma, const Matrix& a, const Vector& s, const Matrix& x);

} // namespace endorse::scores
