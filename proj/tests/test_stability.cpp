#include "doctest.h"
#include "oracles.hpp"

#include "endorse/errors.hpp"
#include "endorse/scores.hpp"
#include "endorse/stability.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace endorse;
using namespace endorse::stability;

namespace {

DriftModel make(ScoreKind kind, int n, int m, double b1, double b2 = 0.0) {
    core::ModelParams p;
    p.score_kind = kind;
    p.m = m;
    p.beta = Eigen::Vector2d(b1, b2);
    return drift_model(p, n);
}

oracle::Kind to_oracle(ScoreKind k) {
    switch (k) {
    case ScoreKind::RootDegree:
        return oracle::Kind::RootDegree;
    case ScoreKind::PageRank:
        return oracle::Kind::PageRank;
    case ScoreKind::SpringRank:
        break;
    }
    return oracle::Kind::SpringRank;
}

double crit(ScoreKind kind, int n, int m) { return critical_beta1(kind, n, m, 0.85, 1e-8); }

} // namespace

TEST_CASE("critical values") {
    CHECK(std::abs(crit(ScoreKind::PageRank, 8, 1) - 1.0 / 0.85) < 1e-12);
    CHECK(std::abs(crit(ScoreKind::SpringRank, 8, 1) - (2.0 + 8e-8)) < 1e-15);
    CHECK(std::abs(critical_beta1(ScoreKind::RootDegree, 70, 150, 0.85, 1e-8) - 2.0 * std::sqrt(70.0 / 150.0)) <
          1e-15);
    CHECK(std::abs(crit(ScoreKind::RootDegree, 8, 1) - 2.0 * std::sqrt(8.0)) < 1e-12);
    CHECK_THROWS_AS(crit(ScoreKind::RootDegree, 1, 1), DomainError);
    CHECK_THROWS_AS(critical_beta1(ScoreKind::RootDegree, 4, 0.0, 0.85, 1e-8), DomainError);
}

TEST_CASE("egalitarian roots") {
    oracle::Gen gen(1);
    for (auto kind : kAllScoreKinds) {
        for (int trial = 0; trial < 5; ++trial) {
            const int n = gen.integer(2, 12), m = gen.integer(1, 30);
            const auto model = make(kind, n, m, gen.uniform(-5, 10), gen.uniform(-5, 5));
            const Vector s0 = egalitarian_root(model);
            CHECK(equilibrium_residual(model, s0).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK(drift(model, s0, expected_update(model, s0)).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK(std::abs(s0.sum() - conserved_total(model)) < 1e-12);
        }
    }
    const auto pr = make(ScoreKind::PageRank, 6, 1, 0.0);
    CHECK(f_pagerank_root_system(Vector::Ones(6), pr).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("degree drift examples") {
    const auto flat = make(ScoreKind::RootDegree, 5, 3, 0.0);
    Vector d(5);
    d << 0.1, 2, 0.3, 0, 1;
    CHECK((f_degree(d, flat) - (Vector::Constant(5, 0.6) - d)).cwiseAbs().maxCoeff() < 1e-15);

    const auto strong = make(ScoreKind::RootDegree, 2, 1, 10.0);
    const Vector f = f_degree(Eigen::Vector2d(0.6, 0.4), strong);
    CHECK(f(0) > 0.0);
    CHECK(f(1) < 0.0);
    CHECK(std::abs(f.sum()) < 1e-15);
}

TEST_CASE("springrank drift vanishes at zero scores and symmetric states") {
    oracle::Gen gen(2);
    const auto model = make(ScoreKind::SpringRank, 6, 2, 3.0, -1.0);
    Matrix a = gen.matrix(6, 0.01);
    a = (a + a.transpose()).eval();
    const Vector s = scores::springrank_score(a, 1e-8);
    CHECK(s.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(f_springrank(s, a, model).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(f_springrank(Vector::Zero(6), Matrix::Constant(6, 6, 2.0 / 36), model).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pagerank root system preconditions") {
    const auto model = make(ScoreKind::PageRank, 4, 1, 2.0);
    CHECK_THROWS_AS(f_pagerank_root_system(Vector::Constant(4, 0.9), model), DomainError);
    CHECK_THROWS_AS(f_pagerank_root_system(Eigen::Vector4d(2, 2, 1, -1), model), DomainError);
    CHECK_THROWS_AS(f_pagerank_root_system(Vector::Ones(3), model), ShapeError);
}

TEST_CASE("pagerank alternating solver finds an inegalitarian root") {
    const auto model = make(ScoreKind::PageRank, 8, 1, 2.0);
    Vector s0 = Vector::Ones(8);
    s0(0) += 0.7;
    s0.tail(7).array() -= 0.1;
    const auto res = solve_pagerank_equilibrium(model, s0);
    CHECK(res.residual < 1e-9);
    CHECK(f_pagerank_root_system(res.s, model).cwiseAbs().maxCoeff() < 1e-9);
    // independent check: PageRank of the expected update reproduces s
    const Vector again = oracle::pagerank(expected_update(model, res.s), 0.85);
    CHECK((again - res.s).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(res.s.maxCoeff() - res.s.minCoeff() > 0.5);

    PageRankSolveOptions tight;
    tight.max_iterations = 1;
    CHECK_THROWS_AS(solve_pagerank_equilibrium(model, s0, tight), NumericError);
}

TEST_CASE("closed-form drift matches the finite-memory oracle") {
    oracle::Gen gen(4);
    for (auto kind : kAllScoreKinds) {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const int n = gen.integer(3, 9), m = gen.integer(1, 5);
            const double b1 = gen.uniform(0, 4), b2 = gen.uniform(-2, 1);
            const auto model = make(kind, n, m, b1, b2);
            const Matrix a = gen.matrix(n, 0.01, 2.0 * m / (n * n));
            const Vector s = (*model.score)(a);
            const Vector f = drift(model, s, a);
            const Vector expected = oracle::drift(to_oracle(kind), a, b1, b2, m);
            worst = std::max(worst, (f - expected).cwiseAbs().maxCoeff());
            CHECK((drift_generic(model, s, a) - f).cwiseAbs().maxCoeff() < 1e-6 * (1 + f.cwiseAbs().maxCoeff()));
        }
        CAPTURE(to_string(kind));
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("egalitarian linearization") {
    for (auto kind : kAllScoreKinds) {
        CAPTURE(to_string(kind));
        const int n = 8, m = 1;
        const double b1 = 1.7;
        const auto model = make(kind, n, m, b1, -3.0);
        const auto lin = jacobian_egalitarian(model);

        // M has eigenvalue 0 on e and a single repeated value on its complement
        Eigen::SelfAdjointEigenSolver<Matrix> es((lin.m_matrix + lin.m_matrix.transpose()) / 2);
        const double slope = kind == ScoreKind::RootDegree ? 0.5 / std::sqrt(double(m) / n) : 1.0;
        CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
        for (int i = 1; i < n; ++i)
            CHECK(std::abs(es.eigenvalues()(i) - slope * b1 / n) < 1e-12);
        CHECK((lin.m_matrix * Vector::Ones(n)).cwiseAbs().maxCoeff() < 1e-12);

        // closed form agrees with the generic linearization
        CHECK((lin.jacobian - jacobian(model, egalitarian_root(model))).cwiseAbs().maxCoeff() < 1e-8);

        // beta2 drops out
        const auto no_b2 = jacobian_egalitarian(make(kind, n, m, b1, 0.0));
        CHECK((no_b2.jacobian - lin.jacobian).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((no_b2.m_matrix - lin.m_matrix).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("stability flips at the critical value") {
    for (auto kind : kAllScoreKinds) {
        CAPTURE(to_string(kind));
        const double bc = crit(kind, 8, 1);
        CHECK(jacobian_egalitarian(make(kind, 8, 1, bc * 0.999)).max_real < 0.0);
        CHECK(jacobian_egalitarian(make(kind, 8, 1, bc * 1.001)).max_real > 0.0);
    }
    const auto at = jacobian_egalitarian(make(ScoreKind::RootDegree, 8, 1, crit(ScoreKind::RootDegree, 8, 1)));
    CHECK(std::abs(at.max_real) < 1e-12);
}

TEST_CASE("egalitarian linearization needs gradients and self-endorsement") {
    core::ModelParams p;
    p.score_kind = ScoreKind::PageRank;
    p.beta = Eigen::Vector2d(1, 0);
    p.mask_diagonal = true;
    CHECK_THROWS_AS(jacobian_egalitarian(drift_model(p, 4)), ConfigError);

    p.mask_diagonal = false;
    auto f = choice::linear_prestige();
    f.grad = nullptr;
    p.features = {f, choice::quadratic_proximity()};
    CHECK_THROWS_AS(jacobian_egalitarian(drift_model(p, 4)), ConfigError);
}

TEST_CASE("two-group equilibria are roots") {
    for (auto kind : kAllScoreKinds) {
        CAPTURE(to_string(kind));
        const double bc = crit(kind, 8, 1);
        const std::vector<double> grid{0.6 * bc, 0.95 * bc, 1.5 * bc};
        for (int k = 1; k < 8; ++k) {
            const auto points = two_group_equilibria(make(kind, 8, 1, 0.0), k, grid);
            for (const auto& p : points) {
                CHECK(p.k_elite == k);
                CHECK(p.equilibrium.residual <= 1e-8);
                REQUIRE(p.equilibrium.groups);
                CHECK(p.equilibrium.groups->a > p.equilibrium.groups->b);
                CHECK(std::abs(k * p.equilibrium.groups->a + (8 - k) * p.equilibrium.groups->b -
                               conserved_total(make(kind, 8, 1, 0.0))) < 1e-9);
                CHECK(std::abs(p.equilibrium.gamma.sum() - 1.0) < 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(two_group_equilibria(make(ScoreKind::PageRank, 4, 1, 0.0), 4, std::vector<double>{1.0}),
                    DomainError);
}

TEST_CASE("bistable window below the critical value") {
    for (auto kind : {ScoreKind::RootDegree, ScoreKind::PageRank}) {
        CAPTURE(to_string(kind));
        const double bc = crit(kind, 8, 1);
        const std::vector<double> grid{0.97 * bc};
        const auto points = bifurcation_diagram(make(kind, 8, 1, 0.0), grid);
        int stable_egal = 0, stable_elite = 0;
        for (const auto& p : points) {
            if (!p.equilibrium.stable)
                continue;
            (p.k_elite == 0 ? stable_egal : stable_elite) += 1;
        }
        CHECK(stable_egal == 1);
        CHECK(stable_elite >= 1);
    }
}

TEST_CASE("springrank multi-elite branches lose stability as beta1 grows") {
    const auto model = make(ScoreKind::SpringRank, 8, 1, 0.0);
    const auto stable_k2 = [&](double b1) {
        bool any = false;
        for (const auto& p : two_group_equilibria(model, 2, std::vector<double>{b1}))
            any = any || p.equilibrium.stable;
        return any;
    };
    CHECK(stable_k2(3.0));
    CHECK_FALSE(stable_k2(6.0));
}

TEST_CASE("bifurcation diagram on a single grid point") {
    const auto points = bifurcation_diagram(make(ScoreKind::SpringRank, 5, 1, 0.0), std::vector<double>{1.0});
    REQUIRE(!points.empty());
    CHECK(points.front().k_elite == 0);
    CHECK(points.front().equilibrium.stable);
    for (const auto& p : points)
        CHECK(p.beta1 == 1.0);
}

TEST_CASE("classify reports the spectrum") {
    const auto model = make(ScoreKind::PageRank, 6, 1, 2.0);
    const auto eq = classify(model, Vector::Ones(6));
    CHECK(eq.jacobian_eigs.size() == 6);
    CHECK(std::abs(eq.max_real - (0.85 * 2.0 - 1.0)) < 1e-9);
    CHECK_FALSE(eq.stable);
    CHECK(std::is_sorted(eq.jacobian_eigs.begin(), eq.jacobian_eigs.end(),
                         [](auto x, auto y) { return x.real() > y.real(); }));
}
