#include "endorse/scores.hpp"

#include "endorse/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace endorse::scores {

namespace {

void require_square_nonnegative(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw ShapeError("score functions need a nonempty square matrix");
    if (!a.allFinite() || (a.array() < 0.0).any())
        throw DomainError("score functions need finite nonnegative weights");
}

} // namespace

Vector in_degree(const Matrix& a) { return a.colwise().sum().transpose(); }

Vector out_degree(const Matrix& a) { return a.rowwise().sum(); }

Vector root_degree_score(const Matrix& a) {
    require_square_nonnegative(a);
    return in_degree(a).cwiseSqrt();
}

Matrix pagerank_transition(const Matrix& a) {
    const auto n = a.rows();
    const Vector dout = out_degree(a);
    Matrix w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (dout(i) > 0.0)
            w.col(i) = a.row(i).transpose() / dout(i);
        else
            w.col(i).setConstant(1.0 / static_cast<double>(n));   // dangling node
    }
    return w;
}

Vector pagerank_score(const Matrix& a, double alpha_p, const PageRankOptions& options) {
    require_square_nonnegative(a);
    if (!(alpha_p > 0.0 && alpha_p < 1.0))
        throw DomainError("alpha_p must lie in (0, 1)");
    const auto n = a.rows();
    const double nd = static_cast<double>(n);
    const Matrix w = pagerank_transition(a);

    Vector x = Vector::Constant(n, 1.0 / nd);
    double change = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        Vector next = alpha_p * (w * x);
        next.array() += (1.0 - alpha_p) * x.sum() / nd;
        change = (next - x).lpNorm<1>();
        x = std::move(next);
        if (change <= options.tol)
            break;
    }
    if (!(change <= options.tol) || !x.allFinite()) {
        std::ostringstream msg;
        msg << "PageRank power iteration did not converge: " << it << " iterations, last L1 change " << change
            << " (tol " << options.tol << ")";
        throw NumericError(msg.str());
    }
    return x * (nd / x.sum());
}

Matrix springrank_laplacian(const Matrix& a) {
    Matrix l = -(a + a.transpose());
    l.diagonal() += in_degree(a) + out_degree(a);
    return l;
}

RegularizedLaplacianSolver::RegularizedLaplacianSolver(const Matrix& laplacian, double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0))
        throw DomainError("SpringRank regularization alpha_s must be positive");
    Matrix shifted = laplacian;
    shifted.diagonal().array() += alpha;
    shifted.array() += 1.0;   // + E
    factor_.compute(shifted);
    if (factor_.info() != Eigen::Success)
        throw NumericError("regularized Laplacian is not positive definite");
}

Vector RegularizedLaplacianSolver::solve(const Vector& b) const {
    const double c = b.mean();
    const Vector perp = b.array() - c;
    Vector x = factor_.solve(perp);
    x.array() += c / alpha_;
    return x;
}

Vector RegularizedLaplacianSolver::solve_centered(const Vector& b) const {
    return factor_.solve((b.array() - b.mean()).matrix());
}

Vector springrank_score(const Matrix& a, double alpha_s) {
    require_square_nonnegative(a);
    if (!(alpha_s > 0.0))
        throw DomainError("SpringRank needs alpha_s > 0, got " + std::to_string(alpha_s));
    const RegularizedLaplacianSolver solver(springrank_laplacian(a), alpha_s);
    return solver.solve_centered(in_degree(a) - out_degree(a));
}

std::optional<Vector> InDegreeScore::derivative(const Matrix&, const Vector&, const Matrix& x) const {
    return in_degree(x);
}

std::optional<Vector> RootDegreeScore::derivative(const Matrix&, const Vector& s, const Matrix& x) const {
    const Vector dx = in_degree(x);
    Vector ds(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > 0.0)
            ds(i) = dx(i) / (2.0 * s(i));
        else if (dx(i) == 0.0)
            ds(i) = 0.0;
        else
            throw DomainError("Root-Degree score is not differentiable at zero in-degree (node " +
                              std::to_string(i) + ")");
    }
    return ds;
}

PageRankScore::PageRankScore(double alpha_p, PageRankOptions options) : alpha_(alpha_p), options_(options) {
    if (!(alpha_p > 0.0 && alpha_p < 1.0))
        throw DomainError("alpha_p must lie in (0, 1)");
}

std::optional<Vector> PageRankScore::derivative(const Matrix& a, const Vector& s, const Matrix& x) const {
    const auto n = a.rows();
    const Vector dout = out_degree(a);
    const Vector dx_out = out_degree(x);
    Matrix dw = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (dout(i) > 0.0) {
            dw.col(i) = x.row(i).transpose() / dout(i) - a.row(i).transpose() * (dx_out(i) / (dout(i) * dout(i)));
        } else if (x.row(i).cwiseAbs().maxCoeff() > 0.0) {
            throw DomainError("PageRank is not differentiable at a dangling node (node " + std::to_string(i) + ")");
        }
    }
    Matrix lhs = -alpha_ * pagerank_transition(a);
    lhs.diagonal().array() += 1.0;
    return Vector(lhs.partialPivLu().solve(alpha_ * (dw * s)));
}

SpringRankScore::SpringRankScore(double alpha_s) : alpha_(alpha_s) {
    if (!(alpha_s > 0.0))
        throw DomainError("alpha_s must be positive");
}

std::optional<Vector> SpringRankScore::derivative(const Matrix& a, const Vector& s, const Matrix& x) const {
    const RegularizedLaplacianSolver solver(springrank_laplacian(a), alpha_);
    const Vector rhs = (in_degree(x) - out_degree(x)) - springrank_laplacian(x) * s;
    return solver.solve_centered(rhs);
}

std::shared_ptr<const ScoreFunction> make_score_function(ScoreKind kind, double alpha_p, double alpha_s) {
    switch (kind) {
    case ScoreKind::RootDegree:
        return std::make_shared<RootDegreeScore>();
    case ScoreKind::PageRank:
        return std::make_shared<PageRankScore>(alpha_p);
    case ScoreKind::SpringRank:
        return std::make_shared<SpringRankScore>(alpha_s);
    }
    throw ConfigError("unknown score kind");
}

Vector directional_derivative(const ScoreFunction& sigma, const Matrix& a, const Vector& s, const Matrix& x) {
    if (auto d = sigma.derivative(a, s, x))
        return *d;
    const double xmax = x.cwiseAbs().maxCoeff();
    if (xmax == 0.0)
        return Vector::Zero(s.size());
    const double h = 1e-6 * (1.0 + a.cwiseAbs().maxCoeff()) / xmax;
    const Matrix down = a - h * x;
    if ((down.array() < 0.0).any())
        return (sigma(a + h * x) - s) / h;
    return (sigma(a + h * x) - sigma(down)) / (2.0 * h);
}

} // namespace endorse::scores
