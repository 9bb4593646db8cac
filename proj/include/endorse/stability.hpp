#pragma once

#include "endorse/core.hpp"
#include "endorse/features.hpp"
#include "endorse/scores.hpp"
#include "endorse/types.hpp"

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace endorse::stability {

/**
 * Ingredients of the long-memory dynamics dA/dt = m G(sigma(A)) - A.
 *
 * For Root-Degree the state variable is the in-degree d and the square root
 * is folded into the features, so `score` is the (linear) in-degree map and
 * `features` are the canonical features composed with sqrt.
 */
struct DriftModel {
    ScoreKind kind = ScoreKind::SpringRank;
    int n = 8;
    int m = 1;
    Vector beta = Vector::Zero(2);
    double alpha_p = 0.85;
    double alpha_s = 1e-8;
    bool mask_diagonal = false;
    std::shared_ptr<const scores::ScoreFunction> score;
    std::vector<choice::FeatureMap> features;
};

/// Builds the long-memory model for params with n nodes.
DriftModel drift_model(const core::ModelParams& params, int n);

/// Same model with beta1 replaced.
DriftModel with_beta1(DriftModel model, double beta1);

/// m G(s): the expected update matrix, which is also the stationary state for scores s.
Matrix expected_update(const DriftModel& model, const Vector& s);

/// gamma(s) under the model's utilities.
Vector rank_of(const DriftModel& model, const Vector& s);

/// (m/n) e for Root-Degree (in-degree state), e for PageRank, 0 for SpringRank.
Vector egalitarian_root(const DriftModel& model);

/// Score total preserved by the dynamics: m, n and 0 respectively.
double conserved_total(const DriftModel& model);

/// f(d) = m gamma(d) - d for the degree model (d is the in-degree).
Vector f_degree(const Vector& d, const DriftModel& model);

/**
 * [G^T(s) + alpha^-1 (1 - alpha) n^-2 E] s - alpha^-1 n^-1 s. Zero exactly at
 * PageRank equilibria. Throws DomainError unless e^T s = n (within 1e-9 n) and s > 0.
 */
Vector f_pagerank_root_system(const Vector& s, const DriftModel& model);

/**
 * Closed-form drift for PageRank at state a with s = sigma(a):
 * (I - alpha W)^-1 alpha [X^T D^-1 - a^T D^-2 diag(X e)] s with X = m G(s) - a.
 * Requires positive out-degrees.
 */
Vector f_pagerank(const Vector& s, const Matrix& a, const DriftModel& model);

/**
 * Closed-form drift for SpringRank:
 * -L_alpha^-1 [alpha s + m (L_G s + (n^-1 e - gamma))], L_G = Gamma + n^-1 I - (G + G^T).
 */
Vector f_springrank(const Vector& s, const Matrix& a, const DriftModel& model);

/// Kind-dispatched closed-form drift (Root-Degree ignores a).
Vector drift(const DriftModel& model, const Vector& s, const Matrix& a);

/// D sigma(a)[m G(s) - a] through the score function's derivative (or finite differences).
Vector drift_generic(const DriftModel& model, const Vector& s, const Matrix& a);

/// sigma(m G(s)) - s; zero exactly at equilibria of the long-memory dynamics.
Vector equilibrium_residual(const DriftModel& model, const Vector& s);

struct PageRankSolveOptions {
    double tol = 1e-12;
    int max_iterations = 20000;
    double damping = 1.0;   // 1 = plain alternation
};

struct PageRankSolveResult {
    Vector s;
    double residual = 0.0;   // || f_pagerank_root_system(s) ||_inf
    int iterations = 0;
};

/**
 * Alternates between refreshing G from the current s and taking the leading
 * eigenvector of G^T + alpha^-1 (1 - alpha) n^-2 E (normalized to e^T s = n).
 * Throws NumericError with the last residual when it does not converge.
 */
PageRankSolveResult solve_pagerank_equilibrium(const DriftModel& model, Vector s0,
                                               const PageRankSolveOptions& options = {});

/**
 * Linearization of the long-memory dynamics at an equilibrium s* (A* = m G(s*)):
 * J = m D sigma(A*) dG/ds(s*) - I. Its spectrum decides linear stability.
 */
Matrix jacobian(const DriftModel& model, const Vector& s_star);

struct EgalitarianLinearization {
    Matrix m_matrix;   // d gamma / ds at the egalitarian root
    Matrix jacobian;
    std::vector<std::complex<double>> eigenvalues;
    double max_real = 0.0;
};

/**
 * Closed-form Jacobian at the egalitarian root:
 *   degree:     m M - I
 *   PageRank:   alpha n M - I
 *   SpringRank: -L_alpha^-1 [alpha I + m (2 n^-1 (I - n^-1 E) - M)]
 * Throws ConfigError if a feature lacks an analytic gradient or the diagonal is masked.
 */
EgalitarianLinearization jacobian_egalitarian(const DriftModel& model);

/// 2 sqrt(n/m), 1/alpha_p and 2 + alpha_s n / m.
double critical_beta1(ScoreKind kind, int n, double m, double alpha_p, double alpha_s);

/// |Re lambda| at or below this is reported as marginal.
inline constexpr double kMarginalBand = 1e-10;

struct GroupStructure {
    int k_elite = 0;
    double a = 0.0;   // score of the k elite nodes
    double b = 0.0;   // score of the remaining n - k nodes
};

struct Equilibrium {
    Vector s_star;
    Vector gamma;
    double residual = 0.0;
    std::vector<std::complex<double>> jacobian_eigs;
    double max_real = 0.0;
    bool stable = false;     // max_real < -kMarginalBand
    bool marginal = false;   // |max_real| <= kMarginalBand
    std::optional<GroupStructure> groups;
};

/// Residual, spectrum and stability at s_star.
Equilibrium classify(const DriftModel& model, const Vector& s_star);

struct BranchPoint {
    double beta1 = 0.0;
    int k_elite = 0;    // 0 marks the egalitarian root
    int branch = 0;     // continuation id, unique within one k_elite
    Equilibrium equilibrium;
};

struct TwoGroupOptions {
    int scan_points = 1500;
    double tie_tolerance = 1e-9;   // |a - b| below this merges with the egalitarian root
    double residual_tolerance = 1e-8;
};

/**
 * Two-group equilibria (k elite nodes at a, n - k at b, a > b) for every beta1
 * in the grid. The conserved total reduces each grid point to a scalar
 * equation, whose roots are bracketed on a dense scan and refined. Roots are
 * joined into branches across the grid by nearest elite score.
 *
 * Grid points that fail to solve are skipped (a gap in the branch), not fatal.
 */
std::vector<BranchPoint> two_group_equilibria(const DriftModel& model, int k_elite,
                                              std::span<const double> beta1_grid,
                                              const TwoGroupOptions& options = {});

/// The egalitarian root plus two_group_equilibria for every k in 1..n-1.
std::vector<BranchPoint> bifurcation_diagram(const DriftModel& model, std::span<const double> beta1_grid,
                                             const TwoGroupOptions& options = {});

} // namespace endorse::stability
