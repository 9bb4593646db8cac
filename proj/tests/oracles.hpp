#pragma once

// Reference implementations used to check the library. They are written
// from the model definitions with plain loops and generic dense solvers and
// share no code with src/ beyond the Eigen matrix types.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Kind { RootDegree, PageRank, SpringRank };

inline Vector received(const Matrix& a) {
    Vector d = Vector::Zero(a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            d(j) += a(i, j);
    return d;
}

inline Vector given(const Matrix& a) {
    Vector d = Vector::Zero(a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            d(i) += a(i, j);
    return d;
}

inline Vector root_degree(const Matrix& a) {
    Vector d = received(a);
    for (int i = 0; i < d.size(); ++i)
        d(i) = std::sqrt(d(i));
    return d;
}

// Direct solve of (I - alpha W) x = (1 - alpha) / n e, then scaled to sum n.
inline Vector pagerank(const Matrix& a, double alpha) {
    const int n = static_cast<int>(a.rows());
    const Vector out = given(a);
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            w(j, i) = out(i) > 0 ? a(i, j) / out(i) : 1.0 / n;
    const Matrix lhs = Matrix::Identity(n, n) - alpha * w;
    const Vector rhs = Vector::Constant(n, (1.0 - alpha) / n);
    Vector x = lhs.fullPivLu().solve(rhs);
    return x * (n / x.sum());
}

// Orthonormal basis of the complement of e (Helmert contrasts), n x (n-1).
inline Matrix helmert(int n) {
    Matrix q = Matrix::Zero(n, n - 1);
    for (int c = 1; c < n; ++c) {
        const double norm = std::sqrt(static_cast<double>(c) * (c + 1));
        for (int r = 0; r < c; ++r)
            q(r, c - 1) = 1.0 / norm;
        q(c, c - 1) = -static_cast<double>(c) / norm;
    }
    return q;
}

// SpringRank from the system restricted to the complement of e, where the
// right-hand side D_in - D_out lives; the e-component of the solution is zero.
inline Vector springrank(const Matrix& a, double alpha) {
    const int n = static_cast<int>(a.rows());
    Matrix l = Matrix::Zero(n, n);
    const Vector in = received(a), out = given(a);
    for (int i = 0; i < n; ++i) {
        l(i, i) += in(i) + out(i) + alpha;
        for (int j = 0; j < n; ++j)
            l(i, j) -= a(i, j) + a(j, i);
    }
    const Matrix q = helmert(n);
    const Matrix reduced = q.transpose() * l * q;
    const Vector y = reduced.fullPivLu().solve(q.transpose() * (in - out));
    return q * y;
}

inline Vector score(Kind kind, const Matrix& a, double alpha_p = 0.85, double alpha_s = 1e-8) {
    switch (kind) {
    case Kind::RootDegree:
        return root_degree(a);
    case Kind::PageRank:
        return pagerank(a, alpha_p);
    case Kind::SpringRank:
        return springrank(a, alpha_s);
    }
    return {};
}

// Canonical utilities u_ij = b1 s_j + b2 (s_i - s_j)^2 and row softmax, in long double.
inline Matrix choice(const Vector& s, double b1, double b2, bool mask = false) {
    const int n = static_cast<int>(s.size());
    Matrix p(n, n);
    for (int i = 0; i < n; ++i) {
        long double mx = -1e300L;
        std::vector<long double> u(n);
        for (int j = 0; j < n; ++j) {
            const long double d = s(i) - s(j);
            u[j] = b1 * static_cast<long double>(s(j)) + b2 * d * d;
            if (!(mask && i == j) && u[j] > mx)
                mx = u[j];
        }
        long double z = 0;
        for (int j = 0; j < n; ++j)
            z += (mask && i == j) ? 0.0L : std::exp(u[j] - mx);
        for (int j = 0; j < n; ++j)
            p(i, j) = (mask && i == j) ? 0.0 : static_cast<double>(std::exp(u[j] - mx) / z);
    }
    return p;
}

inline Vector gamma(const Matrix& p) {
    Vector g = Vector::Zero(p.rows());
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j)
            g(j) += p(i, j) / static_cast<double>(p.rows());
    return g;
}

// Sum_t Sum_ij k_ij log(p_ij / n), rebuilding the state from scratch for every period.
inline double loglik(const std::vector<Matrix>& deltas, const Matrix* a0, double lambda, double b1, double b2,
                     Kind kind) {
    const int n = static_cast<int>(deltas.front().rows());
    const std::size_t first = a0 ? 0 : 1;
    double total = 0.0;
    for (std::size_t t = first; t < deltas.size(); ++t) {
        // A(t) = lambda^(t-first) A(first) + (1 - lambda) sum_{r<t} lambda^(t-1-r) Delta(r)
        Matrix a = a0 ? *a0 : deltas.front();
        a *= std::pow(lambda, static_cast<double>(t - first));
        for (std::size_t r = first; r < t; ++r)
            a += (1.0 - lambda) * std::pow(lambda, static_cast<double>(t - 1 - r)) * deltas[r];
        const Matrix p = choice(score(kind, a), b1, b2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (deltas[t](i, j) > 0)
                    total += deltas[t](i, j) * std::log(p(i, j) / n);
    }
    return total;
}

// Long-memory drift by its defining limit:
// [sigma(lambda A + (1 - lambda) m G(s)) - s] / (1 - lambda) with s = sigma(A).
// For Root-Degree the state variable is the in-degree, so sigma is the in-degree map
// and the utilities see its square root.
inline Vector drift(Kind kind, const Matrix& a, double b1, double b2, int m, double lambda = 1.0 - 1e-6,
                    double alpha_p = 0.85, double alpha_s = 1e-8) {
    const int n = static_cast<int>(a.rows());
    auto state_score = [&](const Matrix& x) {
        return kind == Kind::RootDegree ? received(x) : score(kind, x, alpha_p, alpha_s);
    };
    const Vector s = state_score(a);
    Vector u_scores = s;
    if (kind == Kind::RootDegree)
        for (int i = 0; i < n; ++i)
            u_scores(i) = std::sqrt(s(i));
    const Matrix g = choice(u_scores, b1, b2) * (static_cast<double>(m) / n);
    return (state_score(lambda * a + (1.0 - lambda) * g) - s) / (1.0 - lambda);
}

// Hand-rolled generators for property tests.
class Gen {
  public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

    // Nonnegative matrix with every entry at least `floor`.
    Matrix matrix(int n, double floor = 0.0, double scale = 1.0) {
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a(i, j) = floor + scale * uniform();
        return a;
    }

    // Sparse integer counts with the given total.
    Matrix counts(int n, int total) {
        Matrix d = Matrix::Zero(n, n);
        for (int k = 0; k < total; ++k)
            d(integer(0, n - 1), integer(0, n - 1)) += 1.0;
        return d;
    }

    Vector vector(int n, double lo, double hi) {
        Vector v(n);
        for (int i = 0; i < n; ++i)
            v(i) = uniform(lo, hi);
        return v;
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace oracle
