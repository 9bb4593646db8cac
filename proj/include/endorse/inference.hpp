#pragma once

#include "endorse/features.hpp"
#include "endorse/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace endorse::inference {

/**
 * Observed update matrices Delta(0..T-1) over a fixed node set.
 *
 * When `a0` is present it is the state before the first period and every
 * period enters the likelihood. Otherwise the first period is consumed as the
 * initial state and excluded from the likelihood.
 */
struct InteractionSequence {
    std::vector<Matrix> deltas;
    std::optional<Matrix> a0;
    std::vector<std::string> node_labels;
    std::vector<std::string> period_labels;
    std::string period_unit = "period";

    Eigen::Index n() const { return static_cast<Eigen::Index>(node_labels.size()); }
    std::size_t periods() const { return deltas.size(); }

    /// Total endorsements per period.
    std::vector<double> totals() const;
    /// Mean total over the periods that enter the likelihood.
    double mean_total() const;
    /// Throws ShapeError / DomainError on inconsistent contents.
    void validate() const;
};

struct LikelihoodOptions {
    double alpha_p = 0.85;
    double alpha_s = 1e-8;
    bool mask_diagonal = false;
    std::vector<choice::FeatureMap> features = choice::canonical_features();
};

/**
 * Sum over periods and cells of k_ij(t) log G_ij(t), with G = p / n from the
 * scores of the state rolled forward with the observed updates. The multinomial
 * constant is dropped. Returns -infinity when an observed cell has zero probability.
 */
double log_likelihood(const InteractionSequence& seq, double lambda, const Vector& beta, ScoreKind kind,
                      const LikelihoodOptions& options = {});

/// d log_likelihood / d beta; scores depend on lambda only, so this is the exact softmax identity.
Vector grad_beta(const InteractionSequence& seq, double lambda, const Vector& beta, ScoreKind kind,
                 const LikelihoodOptions& options = {});

/**
 * Likelihood as a function of beta at fixed lambda. Scores and features are
 * computed once on construction.
 */
class ProfileLikelihood {
  public:
    ProfileLikelihood(const InteractionSequence& seq, double lambda, ScoreKind kind,
                      const LikelihoodOptions& options = {});

    double value(const Vector& beta) const;
    Vector gradient(const Vector& beta) const;
    Matrix hessian(const Vector& beta) const;

    struct Maximum {
        Vector beta;
        double value = 0.0;
        double grad_norm = 0.0;
        int iterations = 0;
        bool converged = false;
    };

    /// Damped Newton ascent (the objective is concave in beta).
    Maximum maximize(const Vector& beta0, int max_iterations = 100) const;

    std::size_t features() const { return feature_count_; }

  private:
    struct Period {
        Matrix counts;
        std::vector<Matrix> phi;
    };
    void accumulate(const Vector& beta, double* value, Vector* grad, Matrix* hess) const;

    std::vector<Period> periods_;
    std::size_t feature_count_ = 0;
    bool mask_diagonal_ = false;
    Eigen::Index n_ = 0;
};

struct RestartTrace {
    double start = 0.0;
    double lambda = 0.0;
    double loglik = 0.0;
    int evaluations = 0;
    bool converged = false;
    std::string message;
};

struct FitDiagnostics {
    std::vector<RestartTrace> restarts;
    double grad_norm = 0.0;
    bool se_available = false;
    std::string warning;
};

struct FitResult {
    ScoreKind score_kind = ScoreKind::SpringRank;
    double lambda_hat = 0.0;
    Vector beta_hat;
    Vector se;   // (lambda, beta...); NaN when unavailable
    double loglik = 0.0;
    double halflife = 0.0;
    FitDiagnostics diagnostics;
};

struct FitOptions {
    LikelihoodOptions likelihood;
    std::vector<double> lambda_starts{0.1, 0.3, 0.5, 0.7, 0.9};
    double lambda_tol = 1e-6;
    double lambda_min = 1e-4;
    double lambda_max = 1.0 - 1e-4;
};

/// t_1/2 = -log 2 / log lambda, in periods.
double halflife(double lambda);

/**
 * Maximum-likelihood (lambda, beta). Inner Newton ascent in beta at fixed lambda,
 * outer bracketing hill-climb plus Brent refinement in lambda from each start.
 * Standard errors come from the inverse of the negative finite-difference Hessian.
 * Throws DomainError for fewer than two periods and NumericError when every restart fails.
 */
FitResult fit(const InteractionSequence& seq, ScoreKind kind, const FitOptions& options = {});

struct ComparisonRow {
    ScoreKind kind = ScoreKind::SpringRank;
    std::optional<FitResult> result;
    std::string error;
    bool best = false;
};

/// Fits each kind on the same data. Rows come back in canonical kind order; the highest likelihood is flagged.
std::vector<ComparisonRow> compare_scores(const InteractionSequence& seq, const std::vector<ScoreKind>& kinds,
                                          const FitOptions& options = {});

enum class Criticality { AboveSignificant, BelowSignificant, Indistinguishable };

std::string_view to_string(Criticality c);

/// Above/below when beta1 differs from the critical value by more than two standard errors.
Criticality classify_criticality(double beta1_hat, double se, double beta1_critical);

struct CriticalityReport {
    ScoreKind kind = ScoreKind::SpringRank;
    int n = 0;
    double m_bar = 0.0;
    double beta1_critical = 0.0;
    double beta1_hat = 0.0;
    double se_beta1 = 0.0;
    Criticality classification = Criticality::Indistinguishable;
};

CriticalityReport criticality_report(const FitResult& fit, int n, double m_bar, double alpha_p = 0.85,
                                     double alpha_s = 1e-8);

} // namespace endorse::inference
