#include "endorse/stability.hpp"

#include "endorse/choice.hpp"
#include "endorse/errors.hpp"
#include "endorse/parallel.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace endorse::stability {

DriftModel drift_model(const core::ModelParams& params, int n) {
    params.validate();
    if (n < 2)
        throw DomainError("n must be at least 2");
    DriftModel model;
    model.kind = params.score_kind;
    model.n = n;
    model.m = params.m;
    model.beta = params.beta;
    model.alpha_p = params.alpha_p;
    model.alpha_s = params.alpha_s;
    model.mask_diagonal = params.mask_diagonal;
    if (params.score_kind == ScoreKind::RootDegree) {
        model.score = std::make_shared<scores::InDegreeScore>();
        for (const auto& f : params.features)
            model.features.push_back(choice::composed_with_sqrt(f));
    } else {
        model.score = scores::make_score_function(params.score_kind, params.alpha_p, params.alpha_s);
        model.features = params.features;
    }
    return model;
}

DriftModel with_beta1(DriftModel model, double beta1) {
    if (model.beta.size() < 1)
        throw ConfigError("model has no prestige parameter");
    model.beta(0) = beta1;
    return model;
}

namespace {

Matrix choice_matrix(const DriftModel& model, const Vector& s) {
    if (s.size() != model.n)
        throw ShapeError("score vector has " + std::to_string(s.size()) + " entries, model has n = " +
                         std::to_string(model.n));
    return choice::choice_probabilities(s, model.beta, model.features, model.mask_diagonal).p;
}

double inv(int n) { return 1.0 / static_cast<double>(n); }

} // namespace

Matrix expected_update(const DriftModel& model, const Vector& s) {
    return choice_matrix(model, s) * (static_cast<double>(model.m) * inv(model.n));
}

Vector rank_of(const DriftModel& model, const Vector& s) {
    return choice_matrix(model, s).colwise().sum().transpose() * inv(model.n);
}

Vector egalitarian_root(const DriftModel& model) {
    switch (model.kind) {
    case ScoreKind::RootDegree:
        return Vector::Constant(model.n, static_cast<double>(model.m) * inv(model.n));
    case ScoreKind::PageRank:
        return Vector::Ones(model.n);
    case ScoreKind::SpringRank:
        return Vector::Zero(model.n);
    }
    throw ConfigError("unknown score kind");
}

double conserved_total(const DriftModel& model) {
    switch (model.kind) {
    case ScoreKind::RootDegree:
        return static_cast<double>(model.m);
    case ScoreKind::PageRank:
        return static_cast<double>(model.n);
    case ScoreKind::SpringRank:
        return 0.0;
    }
    throw ConfigError("unknown score kind");
}

Vector f_degree(const Vector& d, const DriftModel& model) {
    return static_cast<double>(model.m) * rank_of(model, d) - d;
}

Vector f_pagerank_root_system(const Vector& s, const DriftModel& model) {
    const double n = static_cast<double>(model.n);
    if (s.size() != model.n)
        throw ShapeError("score vector does not match the model size");
    if (std::abs(s.sum() - n) > 1e-9 * n)
        throw DomainError("PageRank candidates must satisfy e^T s = n (got " + std::to_string(s.sum()) + ")");
    if ((s.array() <= 0.0).any())
        throw DomainError("PageRank candidates must be strictly positive");
    const double alpha = model.alpha_p;
    const Matrix g = choice_matrix(model, s) / n;
    Vector r = g.transpose() * s;
    r.array() += (1.0 - alpha) / (alpha * n * n) * s.sum();
    r -= s / (alpha * n);
    return r;
}

Vector f_pagerank(const Vector& s, const Matrix& a, const DriftModel& model) {
    const Vector dout = a.rowwise().sum();
    if ((dout.array() <= 0.0).any())
        throw DomainError("closed-form PageRank drift needs positive out-degrees");
    const Matrix x = expected_update(model, s) - a;
    const Vector dinv = dout.cwiseInverse();
    const Vector xe = x.rowwise().sum();
    // (X^T D^-1 - a^T D^-2 diag(X e)) s
    const Vector inner = x.transpose() * dinv.cwiseProduct(s) -
                         a.transpose() * (dinv.cwiseProduct(dinv).cwiseProduct(xe).cwiseProduct(s));
    Matrix lhs = -model.alpha_p * a.transpose() * dinv.asDiagonal();
    lhs.diagonal().array() += 1.0;
    return lhs.partialPivLu().solve(model.alpha_p * inner);
}

Vector f_springrank(const Vector& s, const Matrix& a, const DriftModel& model) {
    const auto n = model.n;
    const Matrix g = expected_update(model, s) / static_cast<double>(model.m);
    const Vector gamma = g.colwise().sum().transpose();
    Matrix lg = -(g + g.transpose());
    lg.diagonal() += gamma;
    lg.diagonal().array() += inv(n);
    Vector forcing = lg * s;
    forcing.array() += inv(n);
    forcing -= gamma;
    // e^T forcing = 0, and L_alpha^-1 alpha s has e-component exactly mean(s) e.
    const double mean_s = s.mean();
    const Vector centered = (s.array() - mean_s).matrix();
    const scores::RegularizedLaplacianSolver solver(scores::springrank_laplacian(a), model.alpha_s);
    Vector f = -solver.solve_centered(model.alpha_s * centered + static_cast<double>(model.m) * forcing);
    f.array() -= mean_s;
    return f;
}

Vector drift(const DriftModel& model, const Vector& s, const Matrix& a) {
    switch (model.kind) {
    case ScoreKind::RootDegree:
        return f_degree(s, model);
    case ScoreKind::PageRank:
        return f_pagerank(s, a, model);
    case ScoreKind::SpringRank:
        return f_springrank(s, a, model);
    }
    throw ConfigError("unknown score kind");
}

Vector drift_generic(const DriftModel& model, const Vector& s, const Matrix& a) {
    return scores::directional_derivative(*model.score, a, s, expected_update(model, s) - a);
}

Vector equilibrium_residual(const DriftModel& model, const Vector& s) {
    return (*model.score)(expected_update(model, s)) - s;
}

PageRankSolveResult solve_pagerank_equilibrium(const DriftModel& model, Vector s0,
                                               const PageRankSolveOptions& options) {
    if (s0.size() != model.n)
        throw ShapeError("start vector does not match the model size");
    if (!(options.damping > 0.0 && options.damping <= 1.0))
        throw DomainError("damping must lie in (0, 1]");
    const double n = static_cast<double>(model.n);
    Vector s = s0 * (n / s0.sum());
    double change = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < options.max_iterations && change > options.tol; ++it) {
        // leading eigenvector of G^T + alpha^-1 (1 - alpha) n^-2 E is the PageRank vector of G
        const Vector next = scores::pagerank_score(expected_update(model, s), model.alpha_p);
        const Vector mixed = (1.0 - options.damping) * s + options.damping * next;
        change = (mixed - s).cwiseAbs().maxCoeff();
        s = mixed * (n / mixed.sum());
    }
    PageRankSolveResult result;
    result.s = s;
    result.iterations = it;
    result.residual = f_pagerank_root_system(s, model).cwiseAbs().maxCoeff();
    if (change > options.tol)
        throw NumericError("PageRank equilibrium iteration did not converge after " + std::to_string(it) +
                           " iterations; last change " + std::to_string(change) + ", residual " +
                           std::to_string(result.residual));
    return result;
}

Matrix jacobian(const DriftModel& model, const Vector& s_star) {
    const auto n = s_star.size();
    const Matrix a_star = expected_update(model, s_star);
    const auto dG = choice::rate_matrix_derivatives(s_star, model.beta, model.features, model.mask_diagonal);
    Matrix jac(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        jac.col(k) = static_cast<double>(model.m) *
                     scores::directional_derivative(*model.score, a_star, s_star, dG[static_cast<std::size_t>(k)]);
    jac.diagonal().array() -= 1.0;
    return jac;
}

namespace {

std::vector<std::complex<double>> spectrum(const Matrix& jac) {
    Eigen::EigenSolver<Matrix> solver(jac, false);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigenvalue computation failed");
    const Eigen::VectorXcd ev = solver.eigenvalues();
    std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](auto x, auto y) {
        return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });
    return out;
}

} // namespace

EgalitarianLinearization jacobian_egalitarian(const DriftModel& model) {
    if (model.mask_diagonal)
        throw ConfigError("closed-form egalitarian Jacobians assume self-endorsements are allowed");
    for (const auto& f : model.features)
        if (!f.has_gradient())
            throw ConfigError("feature '" + f.id + "' has no analytic gradient");
    if (static_cast<std::size_t>(model.beta.size()) != model.features.size())
        throw ConfigError("beta and features differ in length");

    const auto n = model.n;
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(model.m);
    const Vector s0 = egalitarian_root(model);

    // M = n^-2 (I - n^-1 E) sum_i sum_l beta_l d phi^l_i. / ds
    Matrix sum_du = Matrix::Zero(n, n);
    for (std::size_t l = 0; l < model.features.size(); ++l) {
        const double b = model.beta(static_cast<Eigen::Index>(l));
        if (b == 0.0)
            continue;
        for (const Matrix& gi : model.features[l].grad(s0))
            sum_du += b * gi;
    }
    const Matrix centering = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / nd);
    EgalitarianLinearization lin;
    lin.m_matrix = centering * sum_du / (nd * nd);

    switch (model.kind) {
    case ScoreKind::RootDegree:
        lin.jacobian = md * lin.m_matrix - Matrix::Identity(n, n);
        break;
    case ScoreKind::PageRank:
        lin.jacobian = model.alpha_p * nd * lin.m_matrix - Matrix::Identity(n, n);
        break;
    case ScoreKind::SpringRank: {
        const Matrix a_star = Matrix::Constant(n, n, md / (nd * nd));
        const scores::RegularizedLaplacianSolver solver(scores::springrank_laplacian(a_star), model.alpha_s);
        Matrix inner = model.alpha_s * Matrix::Identity(n, n) + md * (2.0 / nd * centering - lin.m_matrix);
        lin.jacobian.resize(n, n);
        for (Eigen::Index k = 0; k < n; ++k)
            lin.jacobian.col(k) = -solver.solve(inner.col(k));
        break;
    }
    }
    lin.eigenvalues = spectrum(lin.jacobian);
    lin.max_real = lin.eigenvalues.front().real();
    return lin;
}

double critical_beta1(ScoreKind kind, int n, double m, double alpha_p, double alpha_s) {
    if (n < 2)
        throw DomainError("n must be at least 2");
    if (!(m > 0.0))
        throw DomainError("m must be positive");
    switch (kind) {
    case ScoreKind::RootDegree:
        return 2.0 * std::sqrt(static_cast<double>(n) / m);
    case ScoreKind::PageRank:
        if (!(alpha_p > 0.0 && alpha_p < 1.0))
            throw DomainError("alpha_p must lie in (0, 1)");
        return 1.0 / alpha_p;
    case ScoreKind::SpringRank:
        if (!(alpha_s > 0.0))
            throw DomainError("alpha_s must be positive");
        return 2.0 + alpha_s * static_cast<double>(n) / m;
    }
    throw ConfigError("unknown score kind");
}

Equilibrium classify(const DriftModel& model, const Vector& s_star) {
    Equilibrium eq;
    eq.s_star = s_star;
    eq.gamma = rank_of(model, s_star);
    eq.residual = equilibrium_residual(model, s_star).cwiseAbs().maxCoeff();
    eq.jacobian_eigs = spectrum(jacobian(model, s_star));
    eq.max_real = eq.jacobian_eigs.front().real();
    eq.marginal = std::abs(eq.max_real) <= kMarginalBand;
    eq.stable = eq.max_real < -kMarginalBand;
    return eq;
}

namespace {

struct Interval {
    double lo;
    double hi;
};

Vector two_group_vector(int n, int k, double a, double b) {
    Vector s(n);
    s.head(k).setConstant(a);
    s.tail(n - k).setConstant(b);
    return s;
}

// Range of the elite score a with a > b under the conserved total.
Interval elite_range(const DriftModel& model, int k) {
    const double n = static_cast<double>(model.n);
    const double kd = static_cast<double>(k);
    switch (model.kind) {
    case ScoreKind::RootDegree:
        return {static_cast<double>(model.m) / n, static_cast<double>(model.m) / kd};
    case ScoreKind::PageRank:
        return {1.0, n / kd};
    case ScoreKind::SpringRank:
        // two-group SpringRank scores differ by less than one unit, so a - b < 1
        return {0.0, (n - kd) / n};
    }
    throw ConfigError("unknown score kind");
}

struct GroupRoot {
    double a;
    double b;
};

std::vector<GroupRoot> solve_two_group(const DriftModel& model, int k, const TwoGroupOptions& options) {
    const int n = model.n;
    const double total = conserved_total(model);
    const auto b_of = [&](double a) { return (total - k * a) / static_cast<double>(n - k); };
    const auto reduced = [&](double a) {
        const Vector s = two_group_vector(n, k, a, b_of(a));
        return equilibrium_residual(model, s)(0);
    };

    const Interval range = elite_range(model, k);
    const double span = range.hi - range.lo;
    const int points = std::max(options.scan_points, 8);
    const double lo = range.lo + span * 1e-7;
    const double hi = range.hi - span * 1e-9;

    std::vector<double> grid(static_cast<std::size_t>(points));
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        try {
            values[i] = reduced(grid[i]);
        } catch (const Error&) {
            values[i] = std::numeric_limits<double>::quiet_NaN();
        }
    }

    std::vector<GroupRoot> roots;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double fa = values[i];
        const double fb = values[i + 1];
        if (!std::isfinite(fa) || !std::isfinite(fb))
            continue;
        double root;
        if (fa == 0.0) {
            root = grid[i];
        } else if (fa * fb < 0.0) {
            boost::uintmax_t max_iter = 200;
            try {
                const auto bracket = boost::math::tools::toms748_solve(
                    reduced, grid[i], grid[i + 1], fa, fb,
                    boost::math::tools::eps_tolerance<double>(52), max_iter);
                root = 0.5 * (bracket.first + bracket.second);
            } catch (const std::exception&) {
                continue;
            }
        } else {
            continue;
        }
        const double b = b_of(root);
        if (std::abs(root - b) < options.tie_tolerance)
            continue;
        const Vector s = two_group_vector(n, k, root, b);
        double residual;
        try {
            residual = equilibrium_residual(model, s).cwiseAbs().maxCoeff();
        } catch (const Error&) {
            continue;
        }
        if (residual <= options.residual_tolerance)
            roots.push_back({root, b});
    }
    return roots;
}

} // namespace

std::vector<BranchPoint> two_group_equilibria(const DriftModel& model, int k_elite,
                                              std::span<const double> beta1_grid, const TwoGroupOptions& options) {
    if (k_elite < 1 || k_elite >= model.n)
        throw DomainError("k_elite must lie in [1, n - 1], got " + std::to_string(k_elite));

    std::vector<std::vector<BranchPoint>> per_grid(beta1_grid.size());
    parallel_for(beta1_grid.size(), [&](std::size_t g) {
        const DriftModel local = with_beta1(model, beta1_grid[g]);
        std::vector<GroupRoot> roots;
        try {
            roots = solve_two_group(local, k_elite, options);
        } catch (const Error&) {
            return;   // gap at this grid point
        }
        for (const auto& r : roots) {
            BranchPoint point;
            point.beta1 = beta1_grid[g];
            point.k_elite = k_elite;
            try {
                point.equilibrium = classify(local, two_group_vector(model.n, k_elite, r.a, r.b));
            } catch (const Error&) {
                continue;
            }
            point.equilibrium.groups = GroupStructure{k_elite, r.a, r.b};
            per_grid[g].push_back(std::move(point));
        }
    });

    // Continuation: join roots across consecutive grid points by nearest elite score.
    std::vector<BranchPoint> out;
    std::vector<std::pair<int, double>> active;   // branch id, last elite score
    int next_id = 0;
    for (auto& points : per_grid) {
        std::vector<std::pair<int, double>> now;
        std::vector<bool> taken(active.size(), false);
        for (auto& point : points) {
            const double a = point.equilibrium.groups->a;
            int best = -1;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < active.size(); ++j) {
                const double d = std::abs(active[j].second - a);
                if (!taken[j] && d < best_dist) {
                    best = static_cast<int>(j);
                    best_dist = d;
                }
            }
            if (best >= 0) {
                taken[static_cast<std::size_t>(best)] = true;
                point.branch = active[static_cast<std::size_t>(best)].first;
            } else {
                point.branch = next_id++;
            }
            now.emplace_back(point.branch, a);
            out.push_back(std::move(point));
        }
        active = std::move(now);
    }
    return out;
}

std::vector<BranchPoint> bifurcation_diagram(const DriftModel& model, std::span<const double> beta1_grid,
                                             const TwoGroupOptions& options) {
    std::vector<BranchPoint> out;
    std::vector<BranchPoint> egalitarian(beta1_grid.size());
    parallel_for(beta1_grid.size(), [&](std::size_t g) {
        const DriftModel local = with_beta1(model, beta1_grid[g]);
        BranchPoint point;
        point.beta1 = beta1_grid[g];
        point.equilibrium = classify(local, egalitarian_root(local));
        point.equilibrium.groups = GroupStructure{0, point.equilibrium.s_star(0), point.equilibrium.s_star(0)};
        egalitarian[g] = std::move(point);
    });
    out.insert(out.end(), egalitarian.begin(), egalitarian.end());
    for (int k = 1; k < model.n; ++k) {
        auto branch = two_group_equilibria(model, k, beta1_grid, options);
        out.insert(out.end(), std::make_move_iterator(branch.begin()), std::make_move_iterator(branch.end()));
    }
    return out;
}

} // namespace endorse::stability
