#pragma once

#include <string>

#include <Eigen/Core>

#include "gdnn/cone_spec.hpp"
#include "gdnn/conic_program.hpp"
#include "gdnn/experiments.hpp"
#include "gdnn/forms.hpp"
#include "gdnn/gcpp.hpp"
#include "gdnn/membership.hpp"

namespace gdnn {

// JSON (and whitespace-text) serialization of the toolkit's interchange
// objects; formats are documented in the README.

std::string cone_spec_to_json(const ConeSpec& spec);
ConeSpec cone_spec_from_json(const std::string& text);
ConeSpec load_cone_spec(const std::string& path);

std::string matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const std::string& text);
/// Reads a dense matrix from a .json file (array of arrays) or a
/// whitespace-separated text file (one row per line).
Eigen::MatrixXd load_matrix(const std::string& path);
Eigen::VectorXd load_vector(const std::string& path);

std::string form_to_json(const Form& f);
Form form_from_json(const std::string& text);
std::string moment_vector_to_json(const MomentVector& y);
MomentVector moment_vector_from_json(const std::string& text);

std::string instance_to_json(const MisocpInstance& inst);
MisocpInstance instance_from_json(const std::string& text);
MisocpInstance load_instance(const std::string& path);

std::string program_to_json(const BlockConicProgram& p);
BlockConicProgram program_from_json(const std::string& text);
BlockConicProgram load_program(const std::string& path);

std::string membership_to_json(const MembershipResult& r,
                               const std::string& variant);
std::string separation_to_json(const SeparationOutcome& out);
std::string solution_to_json(const Solution& sol);
std::string fig1_report_to_json(const Fig1Report& rep);
std::string table_report_to_json(const TableReport& rep);
std::string exchange_result_to_json(const ExchangeResult& r);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace gdnn
