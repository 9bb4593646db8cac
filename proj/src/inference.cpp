#include "endorse/inference.hpp"

#include "endorse/choice.hpp"
#include "endorse/errors.hpp"
#include "endorse/parallel.hpp"
#include "endorse/scores.hpp"
#include "endorse/stability.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace endorse::inference {

std::vector<double> InteractionSequence::totals() const {
    std::vector<double> out;
    out.reserve(deltas.size());
    for (const auto& d : deltas)
        out.push_back(d.sum());
    return out;
}

double InteractionSequence::mean_total() const {
    const auto t = totals();
    const std::size_t first = a0 ? 0 : 1;
    if (t.size() <= first)
        return 0.0;
    double sum = 0.0;
    for (std::size_t i = first; i < t.size(); ++i)
        sum += t[i];
    return sum / static_cast<double>(t.size() - first);
}

void InteractionSequence::validate() const {
    if (deltas.empty())
        throw DomainError("interaction sequence has no periods");
    const Eigen::Index size = node_labels.empty() ? deltas.front().rows() : n();
    if (size < 2)
        throw ShapeError("interaction sequence needs at least two nodes");
    for (std::size_t t = 0; t < deltas.size(); ++t) {
        const Matrix& d = deltas[t];
        if (d.rows() != size || d.cols() != size)
            throw ShapeError("period " + std::to_string(t) + " update matrix is " + std::to_string(d.rows()) + "x" +
                             std::to_string(d.cols()) + ", expected " + std::to_string(size));
        if (!d.allFinite() || (d.array() < 0.0).any())
            throw DomainError("period " + std::to_string(t) + " has negative or non-finite counts");
    }
    if (a0) {
        if (a0->rows() != size || a0->cols() != size)
            throw ShapeError("initial state does not match the node count");
        if (!a0->allFinite() || (a0->array() < 0.0).any())
            throw DomainError("initial state has negative or non-finite entries");
    }
    if (!period_labels.empty() && period_labels.size() != deltas.size())
        throw ShapeError("period labels do not match the number of periods");
}

namespace {

// Scores s(t) for every period that enters the likelihood, paired with its counts.
struct ScoredPeriod {
    Vector s;
    const Matrix* counts;
};

std::vector<ScoredPeriod> scored_periods(const InteractionSequence& seq, double lambda, ScoreKind kind,
                                         const LikelihoodOptions& options) {
    seq.validate();
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw DomainError("lambda must lie in [0, 1]");
    const auto sigma = scores::make_score_function(kind, options.alpha_p, options.alpha_s);
    std::size_t first = 0;
    Matrix a;
    if (seq.a0) {
        a = *seq.a0;
    } else {
        a = seq.deltas.front();
        first = 1;
    }
    std::vector<ScoredPeriod> out;
    out.reserve(seq.deltas.size() - first);
    for (std::size_t t = first; t < seq.deltas.size(); ++t) {
        try {
            out.push_back({(*sigma)(a), &seq.deltas[t]});
        } catch (const NumericError& e) {
            throw NumericError("period " + std::to_string(t) + ": " + e.what());
        }
        a = lambda * a + (1.0 - lambda) * seq.deltas[t];
    }
    return out;
}

} // namespace

ProfileLikelihood::ProfileLikelihood(const InteractionSequence& seq, double lambda, ScoreKind kind,
                                     const LikelihoodOptions& options)
    : feature_count_(options.features.size()), mask_diagonal_(options.mask_diagonal) {
    const auto scored = scored_periods(seq, lambda, kind, options);
    n_ = seq.deltas.front().rows();
    periods_.reserve(scored.size());
    for (const auto& sp : scored) {
        Period period;
        period.counts = *sp.counts;
        period.phi.reserve(feature_count_);
        for (const auto& f : options.features)
            period.phi.push_back(f.eval(sp.s));
        periods_.push_back(std::move(period));
    }
}

void ProfileLikelihood::accumulate(const Vector& beta, double* value, Vector* grad, Matrix* hess) const {
    if (static_cast<std::size_t>(beta.size()) != feature_count_)
        throw ConfigError("beta has " + std::to_string(beta.size()) + " entries but there are " +
                          std::to_string(feature_count_) + " features");
    const auto k = static_cast<Eigen::Index>(feature_count_);
    const double log_n = std::log(static_cast<double>(n_));
    double total = 0.0;
    Vector g = Vector::Zero(k);
    Matrix h = Matrix::Zero(k, k);
    Vector row_u(n_);
    Vector row_p(n_);
    Matrix row_phi(n_, k);

    for (const auto& period : periods_) {
        for (Eigen::Index i = 0; i < n_; ++i) {
            const double row_count = period.counts.row(i).sum();
            if (row_count == 0.0)
                continue;
            for (Eigen::Index l = 0; l < k; ++l)
                row_phi.col(l) = period.phi[static_cast<std::size_t>(l)].row(i).transpose();
            row_u = row_phi * beta;
            double row_max = -std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < n_; ++j)
                if (!(mask_diagonal_ && i == j))
                    row_max = std::max(row_max, row_u(j));
            double z = 0.0;
            for (Eigen::Index j = 0; j < n_; ++j) {
                row_p(j) = (mask_diagonal_ && i == j) ? 0.0 : std::exp(row_u(j) - row_max);
                z += row_p(j);
            }
            row_p /= z;
            const double log_z = row_max + std::log(z);

            if (value) {
                for (Eigen::Index j = 0; j < n_; ++j) {
                    const double c = period.counts(i, j);
                    if (c == 0.0)
                        continue;
                    if (mask_diagonal_ && i == j) {
                        total = -std::numeric_limits<double>::infinity();
                        continue;
                    }
                    total += c * (row_u(j) - log_z - log_n);
                }
            }
            if (grad || hess) {
                const Vector mean_phi = row_phi.transpose() * row_p;
                if (grad)
                    g += row_phi.transpose() * period.counts.row(i).transpose() - row_count * mean_phi;
                if (hess) {
                    const Matrix centered = row_phi.rowwise() - mean_phi.transpose();
                    h -= row_count * (centered.transpose() * row_p.asDiagonal() * centered);
                }
            }
        }
    }
    if (value)
        *value = total;
    if (grad)
        *grad = g;
    if (hess)
        *hess = h;
}

double ProfileLikelihood::value(const Vector& beta) const {
    double v = 0.0;
    accumulate(beta, &v, nullptr, nullptr);
    return v;
}

Vector ProfileLikelihood::gradient(const Vector& beta) const {
    Vector g;
    accumulate(beta, nullptr, &g, nullptr);
    return g;
}

Matrix ProfileLikelihood::hessian(const Vector& beta) const {
    Matrix h;
    accumulate(beta, nullptr, nullptr, &h);
    return h;
}

ProfileLikelihood::Maximum ProfileLikelihood::maximize(const Vector& beta0, int max_iterations) const {
    Maximum best;
    best.beta = beta0;
    Vector g;
    Matrix h;
    double v = 0.0;
    accumulate(best.beta, &v, &g, &h);
    best.value = v;
    if (!std::isfinite(v) || !g.allFinite()) {
        best.grad_norm = std::numeric_limits<double>::infinity();
        return best;
    }
    for (int it = 0; it < max_iterations; ++it) {
        best.grad_norm = g.norm();
        best.iterations = it;
        if (best.grad_norm <= 1e-9 * (1.0 + std::abs(best.value))) {
            best.converged = true;
            return best;
        }
        // Newton direction on the concave objective; gradient ascent if the Hessian is singular.
        Eigen::LDLT<Matrix> ldlt(-h);
        Vector dir;
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 1e-12).all())
            dir = ldlt.solve(g);
        else
            dir = g / std::max(1.0, -h.diagonal().minCoeff());
        double step = 1.0;
        bool improved = false;
        for (int backtrack = 0; backtrack < 60; ++backtrack) {
            const Vector trial = best.beta + step * dir;
            double tv = 0.0;
            accumulate(trial, &tv, nullptr, nullptr);
            if (std::isfinite(tv) && tv >= best.value - 1e-12 * std::abs(best.value)) {
                best.beta = trial;
                accumulate(best.beta, &v, &g, &h);
                best.value = v;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved)
            break;
    }
    best.grad_norm = g.norm();
    best.converged = std::isfinite(best.value) && best.grad_norm <= 1e-6 * (1.0 + std::abs(best.value));
    return best;
}

double log_likelihood(const InteractionSequence& seq, double lambda, const Vector& beta, ScoreKind kind,
                      const LikelihoodOptions& options) {
    return ProfileLikelihood(seq, lambda, kind, options).value(beta);
}

Vector grad_beta(const InteractionSequence& seq, double lambda, const Vector& beta, ScoreKind kind,
                 const LikelihoodOptions& options) {
    return ProfileLikelihood(seq, lambda, kind, options).gradient(beta);
}

double halflife(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw DomainError("half-life needs lambda in (0, 1)");
    return -std::log(2.0) / std::log(lambda);
}

namespace {

// Profile likelihood in lambda with a warm-started beta.
class LambdaProfile {
  public:
    LambdaProfile(const InteractionSequence& seq, ScoreKind kind, const FitOptions& options)
        : seq_(seq), kind_(kind), options_(options),
          beta_(Vector::Zero(static_cast<Eigen::Index>(options.likelihood.features.size()))) {}

    double operator()(double lambda) {
        ++evaluations;
        auto hit = cache_.find(lambda);
        if (hit != cache_.end())
            return hit->second.value;
        const ProfileLikelihood profile(seq_, lambda, kind_, options_.likelihood);
        auto best = profile.maximize(beta_);
        if (!best.converged) {
            // retry from zero in case the warm start was poor
            auto fresh = profile.maximize(Vector::Zero(beta_.size()), 200);
            if (fresh.converged || !std::isfinite(best.value) || fresh.value > best.value)
                best = fresh;
        }
        if (std::isfinite(best.value) && best.beta.allFinite())
            beta_ = best.beta;
        cache_.emplace(lambda, best);
        return best.value;
    }

    const ProfileLikelihood::Maximum& at(double lambda) {
        (*this)(lambda);
        return cache_.at(lambda);
    }

    int evaluations = 0;

  private:
    const InteractionSequence& seq_;
    ScoreKind kind_;
    const FitOptions& options_;
    Vector beta_;
    std::map<double, ProfileLikelihood::Maximum> cache_;
};

struct RestartOutcome {
    RestartTrace trace;
    double lambda = 0.0;
    ProfileLikelihood::Maximum inner;
};

RestartOutcome climb(const InteractionSequence& seq, ScoreKind kind, const FitOptions& options, double start) {
    LambdaProfile profile(seq, kind, options);
    const double lo_bound = options.lambda_min;
    const double hi_bound = options.lambda_max;
    RestartOutcome out;
    out.trace.start = start;

    double x = std::clamp(start, lo_bound, hi_bound);
    double fx = profile(x);
    // Hill-climb with growing steps until the maximum is bracketed.
    double step = 0.02;
    double lo = std::max(lo_bound, x - step);
    double hi = std::min(hi_bound, x + step);
    const double f_lo = profile(lo);
    const double f_hi = profile(hi);
    int direction = 0;
    if (f_hi > fx && f_hi >= f_lo)
        direction = 1;
    else if (f_lo > fx)
        direction = -1;
    if (direction != 0) {
        double prev = x;
        x = direction > 0 ? hi : lo;
        fx = direction > 0 ? f_hi : f_lo;
        lo = std::min(prev, x);
        hi = std::max(prev, x);
        for (int guard = 0; guard < 200; ++guard) {
            step *= 1.6;
            const double next = std::clamp(x + direction * step, lo_bound, hi_bound);
            if (next == x)
                break;
            const double fn = profile(next);
            lo = std::min(prev, next);
            hi = std::max(prev, next);
            if (fn <= fx)
                break;
            prev = x;
            x = next;
            fx = fn;
        }
    }
    const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(options.lambda_tol))) + 2, 8, 50);
    boost::uintmax_t max_iter = 500;
    const auto neg = [&](double l) { return -profile(l); };
    const auto found = boost::math::tools::brent_find_minima(neg, lo, hi, bits, max_iter);
    double lambda = found.first;
    double value = -found.second;
    if (fx > value) {
        lambda = x;
        value = fx;
    }
    out.lambda = lambda;
    out.inner = profile.at(lambda);
    out.trace.lambda = lambda;
    out.trace.loglik = value;
    out.trace.evaluations = profile.evaluations;
    out.trace.converged = std::isfinite(value) && out.inner.converged;
    if (!out.trace.converged) {
        std::ostringstream msg;
        msg << "inner ascent stopped with gradient norm " << out.inner.grad_norm;
        out.trace.message = msg.str();
    }
    return out;
}

double full_loglik(const InteractionSequence& seq, ScoreKind kind, const LikelihoodOptions& options,
                   const Vector& theta) {
    return log_likelihood(seq, theta(0), theta.tail(theta.size() - 1), kind, options);
}

Matrix finite_difference_hessian(const InteractionSequence& seq, ScoreKind kind, const LikelihoodOptions& options,
                                 const Vector& theta) {
    const auto k = theta.size();
    Vector h(k);
    for (Eigen::Index i = 0; i < k; ++i)
        h(i) = 1e-4 * (1.0 + std::abs(theta(i)));
    // keep lambda +/- h inside (0, 1)
    h(0) = std::min(h(0), 0.5 * std::min(theta(0), 1.0 - theta(0)));
    const auto f = [&](const Vector& x) { return full_loglik(seq, kind, options, x); };
    const double f0 = f(theta);
    Matrix hess(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        Vector xp = theta, xm = theta;
        xp(i) += h(i);
        xm(i) -= h(i);
        hess(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h(i) * h(i));
        for (Eigen::Index j = 0; j < i; ++j) {
            Vector pp = theta, pm = theta, mp = theta, mm = theta;
            pp(i) += h(i), pp(j) += h(j);
            pm(i) += h(i), pm(j) -= h(j);
            mp(i) -= h(i), mp(j) += h(j);
            mm(i) -= h(i), mm(j) -= h(j);
            hess(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h(i) * h(j));
            hess(j, i) = hess(i, j);
        }
    }
    return 0.5 * (hess + hess.transpose());
}

} // namespace

FitResult fit(const InteractionSequence& seq, ScoreKind kind, const FitOptions& options) {
    seq.validate();
    const std::size_t used = seq.periods() - (seq.a0 ? 0 : 1);
    if (seq.periods() < 2 || used < 1)
        throw DomainError("fitting needs at least two periods");
    if (options.lambda_starts.empty())
        throw ConfigError("at least one lambda start is required");
    if (!(options.lambda_min > 0.0 && options.lambda_max < 1.0 && options.lambda_min < options.lambda_max))
        throw ConfigError("lambda search bounds must satisfy 0 < min < max < 1");

    std::vector<RestartOutcome> outcomes(options.lambda_starts.size());
    std::vector<std::string> failures(outcomes.size());
    parallel_for(outcomes.size(), [&](std::size_t r) {
        try {
            outcomes[r] = climb(seq, kind, options, options.lambda_starts[r]);
        } catch (const Error& e) {
            outcomes[r].trace.start = options.lambda_starts[r];
            outcomes[r].trace.loglik = -std::numeric_limits<double>::infinity();
            outcomes[r].trace.message = e.what();
            failures[r] = e.what();
        }
    });

    FitResult result;
    result.score_kind = kind;
    const RestartOutcome* best = nullptr;
    for (const auto& o : outcomes) {
        result.diagnostics.restarts.push_back(o.trace);
        if (!std::isfinite(o.trace.loglik) || o.inner.beta.size() == 0)
            continue;
        if (!best || o.trace.loglik > best->trace.loglik)
            best = &o;
    }
    if (!best) {
        std::ostringstream msg;
        msg << "all " << outcomes.size() << " lambda restarts failed";
        for (const auto& o : outcomes)
            msg << "; start " << o.trace.start << ": " << (o.trace.message.empty() ? "no finite optimum" : o.trace.message);
        throw NumericError(msg.str());
    }

    result.lambda_hat = best->lambda;
    result.beta_hat = best->inner.beta;
    result.loglik = best->inner.value;
    result.halflife = halflife(result.lambda_hat);
    result.diagnostics.grad_norm = best->inner.grad_norm;
    if (!best->inner.converged)
        result.diagnostics.warning = "inner ascent did not reach the gradient tolerance";

    const auto k = result.beta_hat.size() + 1;
    Vector theta(k);
    theta(0) = result.lambda_hat;
    theta.tail(k - 1) = result.beta_hat;
    result.se = Vector::Constant(k, std::numeric_limits<double>::quiet_NaN());
    const Matrix hess = finite_difference_hessian(seq, kind, options.likelihood, theta);
    Eigen::LLT<Matrix> info(-hess);
    if (hess.allFinite() && info.info() == Eigen::Success) {
        const Matrix cov = info.solve(Matrix::Identity(k, k));
        result.se = cov.diagonal().cwiseSqrt();
        result.diagnostics.se_available = result.se.allFinite();
    }
    if (!result.diagnostics.se_available) {
        if (!result.diagnostics.warning.empty())
            result.diagnostics.warning += "; ";
        result.diagnostics.warning += "Hessian is not negative definite; standard errors unavailable";
    }
    return result;
}

std::vector<ComparisonRow> compare_scores(const InteractionSequence& seq, const std::vector<ScoreKind>& kinds,
                                          const FitOptions& options) {
    std::vector<ScoreKind> ordered;
    for (ScoreKind k : kAllScoreKinds)
        if (std::find(kinds.begin(), kinds.end(), k) != kinds.end())
            ordered.push_back(k);
    if (ordered.size() < 2)
        throw ConfigError("comparison needs at least two distinct score kinds");
    std::vector<ComparisonRow> rows;
    for (ScoreKind k : ordered) {
        ComparisonRow row;
        row.kind = k;
        try {
            row.result = fit(seq, k, options);
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    ComparisonRow* best = nullptr;
    for (auto& row : rows)
        if (row.result && (!best || row.result->loglik > best->result->loglik))
            best = &row;
    if (best)
        best->best = true;
    return rows;
}

std::string_view to_string(Criticality c) {
    switch (c) {
    case Criticality::AboveSignificant:
        return "above";
    case Criticality::BelowSignificant:
        return "below";
    case Criticality::Indistinguishable:
        return "indistinguishable";
    }
    return "unknown";
}

Criticality classify_criticality(double beta1_hat, double se, double beta1_critical) {
    const double diff = beta1_hat - beta1_critical;
    if (diff > 2.0 * se)
        return Criticality::AboveSignificant;
    if (diff < -2.0 * se)
        return Criticality::BelowSignificant;
    return Criticality::Indistinguishable;
}

CriticalityReport criticality_report(const FitResult& fit, int n, double m_bar, double alpha_p, double alpha_s) {
    if (fit.beta_hat.size() < 1)
        throw ConfigError("fit has no prestige parameter");
    CriticalityReport report;
    report.kind = fit.score_kind;
    report.n = n;
    report.m_bar = m_bar;
    report.beta1_critical = stability::critical_beta1(fit.score_kind, n, m_bar, alpha_p, alpha_s);
    report.beta1_hat = fit.beta_hat(0);
    report.se_beta1 = fit.se.size() > 1 ? fit.se(1) : std::numeric_limits<double>::quiet_NaN();
    report.classification = classify_criticality(report.beta1_hat, report.se_beta1, report.beta1_critical);
    return report;
}

} // namespace endorse::inference
