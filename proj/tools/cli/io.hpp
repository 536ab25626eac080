#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "otsm/otsm.hpp"

namespace otsm::cli {

/// Bad input file: unreadable, malformed JSON, or a field with the wrong shape.
/// The message names the file and the offending field.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem JSON: {"dims": [...], "r": int, "S": [{"i", "j", "data"}]} with
/// 1-based i < j, or {"r": int, "views": [...]} which builds the MAXDIFF problem.
OtsmProblem load_problem(const std::filesystem::path& path);
OtsmProblem parse_problem(const nlohmann::json& doc, const std::string& source);

/// Solution JSON: {"blocks": [...]}. Blocks off the Stiefel manifold by more
/// than 1e-8 produce a warning on `warn`; more than 1e-4 is an error.
BlockOrthogonal load_solution(const std::filesystem::path& path, const BlockDims& dims,
                              std::ostream& warn);
BlockOrthogonal parse_solution(const nlohmann::json& doc, const BlockDims& dims,
                               const std::string& source, std::ostream& warn);

nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json problem_to_json(const OtsmProblem& problem);
nlohmann::json solution_to_json(const BlockOrthogonal& point);
nlohmann::json certificate_to_json(const CertificateReport& report);

/// Report for `solve`. The certificate and trace are included when given.
nlohmann::json solve_report_to_json(const SolveReport& report, const CertificateReport* cert,
                                    bool include_trace);

/// Writes to `path.tmp` and renames over `path`. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace otsm::cli
