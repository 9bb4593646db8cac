#include "endorse/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace endorse::report {

using nlohmann::json;

std::string format_double(double value) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

namespace {

json matrix_json(const Matrix& a) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            row.push_back(a(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::isfinite(v(i)))
            out.push_back(v(i));
        else
            out.push_back(nullptr);
    }
    return out;
}

} // namespace

void write_trajectory_csv(const sim::Trajectory& traj, std::ostream& out) {
    out << "t,node,gamma\n";
    for (Eigen::Index t = 0; t < traj.gamma.rows(); ++t)
        for (Eigen::Index j = 0; j < traj.gamma.cols(); ++j)
            out << t << ',' << j << ',' << format_double(traj.gamma(t, j)) << '\n';
}

void write_matrix_csv(const Matrix& a, std::ostream& out) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (j)
                out << ',';
            out << format_double(a(i, j));
        }
        out << '\n';
    }
}

json params_json(const core::ModelParams& params) {
    json features = json::array();
    for (const auto& f : params.features)
        features.push_back(f.id);
    return json{{"lambda", params.lambda},
                {"beta", vector_json(params.beta)},
                {"m", params.m},
                {"score", std::string(to_string(params.score_kind))},
                {"alpha_p", params.alpha_p},
                {"alpha_s", params.alpha_s},
                {"seed", params.seed},
                {"features", features},
                {"mask_diagonal", params.mask_diagonal}};
}

json trajectory_json(const sim::Trajectory& traj) {
    return json{{"params", params_json(traj.params)},
                {"seed", traj.seed},
                {"steps", traj.steps()},
                {"n", traj.n()},
                {"a0", matrix_json(traj.a0)},
                {"a_final", matrix_json(traj.a_final)},
                {"gamma", matrix_json(traj.gamma)}};
}

void write_sweep_csv(const std::vector<sim::SweepCell>& cells, std::ostream& out) {
    out << "beta1,beta2,variance\n";
    for (const auto& c : cells)
        out << format_double(c.beta1) << ',' << format_double(c.beta2) << ',' << format_double(c.variance) << '\n';
}

void write_branches_csv(const std::vector<stability::BranchPoint>& points, std::ostream& out) {
    out << "beta1,k_elite,a,b,stable,max_eig_real\n";
    for (const auto& p : points) {
        const auto& eq = p.equilibrium;
        const double a = eq.groups ? eq.groups->a : eq.s_star(0);
        const double b = eq.groups ? eq.groups->b : eq.s_star(eq.s_star.size() - 1);
        out << format_double(p.beta1) << ',' << p.k_elite << ',' << format_double(a) << ',' << format_double(b)
            << ',' << (eq.stable ? 1 : 0) << ',' << format_double(eq.max_real) << '\n';
    }
}

json fit_json(const inference::FitResult& fit) {
    json restarts = json::array();
    for (const auto& r : fit.diagnostics.restarts)
        restarts.push_back(json{{"start", r.start},
                                {"lambda", r.lambda},
                                {"loglik", std::isfinite(r.loglik) ? json(r.loglik) : json(nullptr)},
                                {"evaluations", r.evaluations},
                                {"converged", r.converged},
                                {"message", r.message}});
    return json{{"score", std::string(to_string(fit.score_kind))},
                {"lambda_hat", fit.lambda_hat},
                {"beta_hat", vector_json(fit.beta_hat)},
                {"se", vector_json(fit.se)},
                {"loglik", fit.loglik},
                {"halflife", fit.halflife},
                {"diagnostics",
                 json{{"restarts", restarts},
                      {"grad_norm", fit.diagnostics.grad_norm},
                      {"se_available", fit.diagnostics.se_available},
                      {"warning", fit.diagnostics.warning}}}};
}

void write_table1_header(std::ostream& out) {
    out << "dataset,score,lambda,se_lambda,beta1,se_beta1,beta2,se_beta2,loglik\n";
}

void write_table1_row(const std::string& dataset, const inference::FitResult& fit, std::ostream& out) {
    const auto entry = [](const Vector& v, Eigen::Index i) {
        return i < v.size() ? format_double(v(i)) : std::string("nan");
    };
    out << dataset << ',' << to_string(fit.score_kind) << ',' << format_double(fit.lambda_hat) << ','
        << entry(fit.se, 0) << ',' << entry(fit.beta_hat, 0) << ',' << entry(fit.se, 1) << ','
        << entry(fit.beta_hat, 1) << ',' << entry(fit.se, 2) << ',' << format_double(fit.loglik) << '\n';
}

void write_criticality_header(std::ostream& out) {
    out << "dataset,score,n,m_bar,beta1_critical,beta1,se_beta1,classification\n";
}

void write_criticality_row(const std::string& dataset, const inference::CriticalityReport& rep, std::ostream& out) {
    out << dataset << ',' << to_string(rep.kind) << ',' << rep.n << ',' << format_double(rep.m_bar) << ','
        << format_double(rep.beta1_critical) << ',' << format_double(rep.beta1_hat) << ','
        << format_double(rep.se_beta1) << ',' << inference::to_string(rep.classification) << '\n';
}

} // namespace endorse::report
