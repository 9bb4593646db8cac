#pragma once

#include "endorse/inference.hpp"
#include "endorse/sim.hpp"
#include "endorse/stability.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace endorse::report {

/// Shortest decimal form that round-trips the double.
std::string format_double(double value);

/// `t,node,gamma`
void write_trajectory_csv(const sim::Trajectory& traj, std::ostream& out);

/// Plain n x n CSV without header.
void write_matrix_csv(const Matrix& a, std::ostream& out);

nlohmann::json params_json(const core::ModelParams& params);

/// Parameters, seed, initial and final state, and the gamma history.
nlohmann::json trajectory_json(const sim::Trajectory& traj);

/// `beta1,beta2,variance`
void write_sweep_csv(const std::vector<sim::SweepCell>& cells, std::ostream& out);

/// `beta1,k_elite,a,b,stable,max_eig_real`
void write_branches_csv(const std::vector<stability::BranchPoint>& points, std::ostream& out);

nlohmann::json fit_json(const inference::FitResult& fit);

/// `dataset,score,lambda,se_lambda,beta1,se_beta1,beta2,se_beta2,loglik`
void write_table1_header(std::ostream& out);
void write_table1_row(const std::string& dataset, const inference::FitResult& fit, std::ostream& out);

/// `dataset,score,n,m_bar,beta1_critical,beta1,se_beta1,classification`
void write_criticality_header(std::ostream& out);
void write_criticality_row(const std::string& dataset, const inference::CriticalityReport& rep, std::ostream& out);

} // namespace endorse::report
