#include "doctest.h"
#include "oracles.hpp"

#include "endorse/errors.hpp"
#include "endorse/scores.hpp"

#include <cmath>
#include <string>

using namespace endorse;
using namespace endorse::scores;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Matrix ring(int n) {
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, (i + 1) % n) = 1.0;
        a((i + 1) % n, i) = 1.0;
    }
    return a;
}

} // namespace

TEST_CASE("root degree examples") {
    CHECK(root_degree_score(mat2(0, 4, 0, 0)).isApprox(Eigen::Vector2d(0, 2)));
    const Matrix uniform = Matrix::Constant(8, 8, 1.0 / 64);
    CHECK((root_degree_score(uniform).array() - std::sqrt(1.0 / 8)).abs().maxCoeff() < 1e-15);
    CHECK(root_degree_score(Matrix::Zero(3, 3)).isZero());
}

TEST_CASE("pagerank of regular graphs is uniform") {
    for (double alpha : {0.3, 0.85, 0.99}) {
        CHECK((pagerank_score(Matrix::Constant(6, 6, 1.0 / 36), alpha).array() - 1.0).abs().maxCoeff() < 1e-10);
        CHECK((pagerank_score(ring(7), alpha).array() - 1.0).abs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("pagerank with a dangling node matches the 2x2 solve") {
    // W = [[0, 1/2], [1, 1/2]]; x0 = 0.425 x1 + 0.075 with x0 + x1 = 1 gives x = (20, 37) / 57.
    const Vector s = pagerank_score(mat2(0, 1, 0, 0), 0.85);
    CHECK(std::abs(s(0) - 40.0 / 57.0) < 1e-10);
    CHECK(std::abs(s(1) - 74.0 / 57.0) < 1e-10);
}

TEST_CASE("springrank examples") {
    oracle::Gen gen(2);
    Matrix a = gen.matrix(6);
    a = a + a.transpose().eval();
    CHECK(springrank_score(a, 1e-8).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(springrank_score(Matrix::Constant(5, 5, 1.0 / 25), 1e-8).cwiseAbs().maxCoeff() < 1e-14);
    // [[1 + a, -1], [-1, 1 + a]] s = (-1, 1) gives s = (-1, 1) / (2 + a).
    const Vector s = springrank_score(mat2(0, 1, 0, 0), 1e-8);
    CHECK(std::abs(s(0) + 1.0 / (2.0 + 1e-8)) < 1e-12);
    CHECK(std::abs(s(1) - 1.0 / (2.0 + 1e-8)) < 1e-12);
    CHECK(s(1) - s(0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("springrank rejects nonpositive regularization") {
    CHECK_THROWS_AS(springrank_score(mat2(0, 1, 0, 0), 0.0), DomainError);
    CHECK_THROWS_AS(springrank_score(mat2(0, 1, 0, 0), -1.0), DomainError);
}

TEST_CASE("pagerank reports non-convergence with diagnostics") {
    oracle::Gen gen(4);
    PageRankOptions opts;
    opts.max_iterations = 2;
    try {
        pagerank_score(gen.matrix(6), 0.85, opts);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("2 iterations") != std::string::npos);
    }
}

TEST_CASE("scores agree with independent solvers on random matrices") {
    oracle::Gen gen(8);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = gen.integer(2, 25);
        Matrix a = gen.matrix(n, 0.0, gen.uniform(0.01, 10.0));
        if (trial % 4 == 0)
            a.row(gen.integer(0, n - 1)).setZero();   // dangling node
        const double alpha_p = gen.uniform(0.1, 0.95);
        CHECK((pagerank_score(a, alpha_p) - oracle::pagerank(a, alpha_p)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((springrank_score(a, 1e-8) - oracle::springrank(a, 1e-8)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((root_degree_score(a) - oracle::root_degree(a)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("score invariants under transformations") {
    oracle::Gen gen(9);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = gen.integer(2, 15);
        const Matrix a = gen.matrix(n, 0.0, gen.uniform(0.1, 5.0));
        const double c = gen.uniform(0.1, 20.0);
        const Vector sr = springrank_score(a, 1e-8);
        CHECK((sr + springrank_score(a.transpose(), 1e-8)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((pagerank_score(c * a, 0.85) - pagerank_score(a, 0.85)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((root_degree_score(c * a) - std::sqrt(c) * root_degree_score(a)).cwiseAbs().maxCoeff() < 1e-12);

        const Vector pr = pagerank_score(a, 0.85);
        CHECK((pr.array() > 0.0).all());
        CHECK(std::abs(pr.sum() - n) < 1e-10);

        // residual of the regularized system
        Matrix l = springrank_laplacian(a);
        l.diagonal().array() += 1e-8;
        const Vector rhs = in_degree(a) - out_degree(a);
        CHECK((l * sr - rhs).cwiseAbs().maxCoeff() <= 1e-10 * rhs.cwiseAbs().maxCoeff() + 1e-12);
    }
}

TEST_CASE("regularized Laplacian solver handles the constant direction") {
    oracle::Gen gen(12);
    const Matrix a = gen.matrix(7);
    const Matrix l = springrank_laplacian(a);
    const RegularizedLaplacianSolver solver(l, 0.3);
    const Vector b = gen.vector(7, -1, 1);
    Matrix reg = l;
    reg.diagonal().array() += 0.3;
    CHECK((reg * solver.solve(b) - b).cwiseAbs().maxCoeff() < 1e-12);
    const Vector centered = (b.array() - b.mean()).matrix();
    CHECK((reg * solver.solve_centered(b) - centered).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("analytic score derivatives match finite differences") {
    oracle::Gen gen(21);
    const RootDegreeScore root;
    const InDegreeScore indeg;
    const PageRankScore pr(0.85);
    const SpringRankScore sr(1e-8);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen.integer(2, 12);
        const Matrix a = gen.matrix(n, 0.05);
        Matrix x = gen.matrix(n) - gen.matrix(n);
        for (const ScoreFunction* f : std::initializer_list<const ScoreFunction*>{&root, &indeg, &pr, &sr}) {
            const Vector s = (*f)(a);
            const Vector analytic = *f->derivative(a, s, x);
            const double h = 1e-6;
            const Vector fd = ((*f)(a + h * x) - (*f)(a - h * x)) / (2 * h);
            CAPTURE(f->name());
            CHECK((analytic - fd).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + analytic.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("derivative fallback uses finite differences") {
    struct Squares final : ScoreFunction {
        std::string name() const override { return "squares"; }
        Vector operator()(const Matrix& a) const override { return in_degree(a).array().square(); }
    };
    oracle::Gen gen(1);
    const Matrix a = gen.matrix(4, 0.1);
    const Matrix x = gen.matrix(4);
    const Squares f;
    const Vector expected = 2.0 * in_degree(a).cwiseProduct(in_degree(x));
    CHECK((directional_derivative(f, a, f(a), x) - expected).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("root degree derivative at zero in-degree") {
    const RootDegreeScore root;
    const Matrix a = mat2(0, 1, 0, 0);
    CHECK_THROWS_AS(root.derivative(a, root(a), mat2(1, 0, 0, 0)), DomainError);
    CHECK(root.derivative(a, root(a), mat2(0, 1, 0, 0))->isApprox(Eigen::Vector2d(0, 0.5)));
}
