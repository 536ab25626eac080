#include "cli/io.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace otsm::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& field, const std::string& what) {
  throw InputError(source + ": " + field + ": " + what);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": malformed JSON: " + e.what());
  }
}

const json& require(const json& obj, const char* key, const std::string& source) {
  if (!obj.contains(key)) fail(source, key, "missing");
  return obj.at(key);
}

Index parse_positive(const json& v, const std::string& source, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 1) fail(source, field, "expected a positive integer");
  return static_cast<Index>(v.get<long long>());
}

Matrix parse_matrix(const json& v, const std::string& source, const std::string& field) {
  if (!v.is_array() || v.empty()) fail(source, field, "expected a non-empty array of rows");
  const auto rows = static_cast<Index>(v.size());
  Index cols = -1;
  Matrix out;
  for (Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    const std::string where = field + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.empty()) fail(source, where, "expected a non-empty array of numbers");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      out.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      fail(source, where, "has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    }
    for (Index j = 0; j < cols; ++j) {
      const json& x = row[static_cast<std::size_t>(j)];
      if (!x.is_number()) fail(source, where + "[" + std::to_string(j) + "]", "expected a number");
      out(i, j) = x.get<double>();
      if (!std::isfinite(out(i, j))) fail(source, where + "[" + std::to_string(j) + "]", "not finite");
    }
  }
  return out;
}

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

}  // namespace

OtsmProblem parse_problem(const json& doc, const std::string& source) {
  if (!doc.is_object()) fail(source, "<root>", "expected a JSON object");
  const bool has_s = doc.contains("S");
  const bool has_views = doc.contains("views");
  if (has_s == has_views) fail(source, "S/views", "exactly one of \"S\" or \"views\" is required");
  const Index rank = parse_positive(require(doc, "r", source), source, "r");

  if (has_views) {
    const json& views = doc.at("views");
    if (!views.is_array()) fail(source, "views", "expected an array of matrices");
    ViewData data;
    for (std::size_t k = 0; k < views.size(); ++k) {
      data.views.push_back(parse_matrix(views[k], source, "views[" + std::to_string(k) + "]"));
    }
    if (doc.contains("dims")) {
      const json& dims = doc.at("dims");
      if (!dims.is_array() || dims.size() != data.views.size()) {
        fail(source, "dims", "must list one width per view");
      }
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (parse_positive(dims[k], source, "dims") != data.views[k].cols()) {
          fail(source, "dims[" + std::to_string(k) + "]", "does not match the width of views[" + std::to_string(k) + "]");
        }
      }
    }
    try {
      return build_maxdiff(data, rank);
    } catch (const ValidationError& e) {
      fail(source, "views", e.what());
    }
  }

  const json& dims_json = require(doc, "dims", source);
  if (!dims_json.is_array()) fail(source, "dims", "expected an array of positive integers");
  std::vector<Index> dims;
  for (std::size_t k = 0; k < dims_json.size(); ++k) {
    dims.push_back(parse_positive(dims_json[k], source, "dims[" + std::to_string(k) + "]"));
  }
  std::optional<BlockDims> block_dims;
  try {
    block_dims.emplace(dims, rank);
  } catch (const ValidationError& e) {
    fail(source, "dims/r", e.what());
  }
  const auto m = static_cast<long long>(dims.size());

  const json& entries = doc.at("S");
  if (!entries.is_array()) fail(source, "S", "expected an array of {i, j, data} entries");
  OtsmProblem::BlockMap blocks;
  std::set<std::pair<Index, Index>> seen;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string field = "S[" + std::to_string(k) + "]";
    const json& e = entries[k];
    if (!e.is_object()) fail(source, field, "expected an object");
    const json& ij = require(e, "i", source);
    const json& jj = require(e, "j", source);
    if (!ij.is_number_integer() || !jj.is_number_integer()) fail(source, field, "i and j must be integers");
    const long long i = ij.get<long long>();
    const long long j = jj.get<long long>();
    if (i < 1 || j > m || i >= j) {
      fail(source, field, "needs 1 <= i < j <= " + std::to_string(m) + ", got (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
    }
    const std::pair<Index, Index> key{static_cast<Index>(i - 1), static_cast<Index>(j - 1)};
    if (!seen.insert(key).second) {
      fail(source, field, "duplicate entry for (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    Matrix s = parse_matrix(require(e, "data", source), source, field + ".data");
    if (s.rows() != dims[static_cast<std::size_t>(key.first)] ||
        s.cols() != dims[static_cast<std::size_t>(key.second)]) {
      fail(source, field + ".data",
           "is " + shape(s) + ", expected " + std::to_string(dims[static_cast<std::size_t>(key.first)]) + "x" +
               std::to_string(dims[static_cast<std::size_t>(key.second)]));
    }
    blocks.emplace(key, std::move(s));
  }
  return OtsmProblem(*block_dims, std::move(blocks));
}

OtsmProblem load_problem(const std::filesystem::path& path) {
  return parse_problem(read_json(path), path.string());
}

BlockOrthogonal parse_solution(const json& doc, const BlockDims& dims, const std::string& source,
                               std::ostream& warn) {
  if (!doc.is_object()) fail(source, "<root>", "expected a JSON object");
  const json& blocks_json = require(doc, "blocks", source);
  if (!blocks_json.is_array()) fail(source, "blocks", "expected an array of matrices");
  if (static_cast<Index>(blocks_json.size()) != dims.count()) {
    fail(source, "blocks",
         "has " + std::to_string(blocks_json.size()) + " entries, problem has " + std::to_string(dims.count()));
  }
  std::vector<Matrix> blocks;
  for (Index i = 0; i < dims.count(); ++i) {
    const std::string field = "blocks[" + std::to_string(i) + "]";
    Matrix b = parse_matrix(blocks_json[static_cast<std::size_t>(i)], source, field);
    if (b.rows() != dims.dim(i) || b.cols() != dims.rank()) {
      fail(source, field,
           "is " + shape(b) + ", expected " + std::to_string(dims.dim(i)) + "x" + std::to_string(dims.rank()));
    }
    const double err = orthonormality_error(b);
    if (err > 1e-4) {
      std::ostringstream msg;
      msg << "columns are not orthonormal (||O^T O - I||_F = " << err << ")";
      fail(source, field, msg.str());
    }
    if (err > 1e-8) {
      warn << "warning: " << source << ": " << field << ": ||O^T O - I||_F = " << err
           << " exceeds 1e-8\n";
    }
    blocks.push_back(std::move(b));
  }
  return BlockOrthogonal(dims, std::move(blocks), 1e-4);
}

BlockOrthogonal load_solution(const std::filesystem::path& path, const BlockDims& dims, std::ostream& warn) {
  return parse_solution(read_json(path), dims, path.string(), warn);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json problem_to_json(const OtsmProblem& problem) {
  json doc;
  doc["dims"] = problem.dims().dims();
  doc["r"] = problem.dims().rank();
  json entries = json::array();
  for (const auto& [key, s] : problem.stored_blocks()) {
    entries.push_back({{"i", key.first + 1}, {"j", key.second + 1}, {"data", matrix_to_json(s)}});
  }
  doc["S"] = std::move(entries);
  return doc;
}

json solution_to_json(const BlockOrthogonal& point) {
  json blocks = json::array();
  for (const auto& b : point.blocks()) blocks.push_back(matrix_to_json(b));
  return {{"blocks", std::move(blocks)}};
}

json certificate_to_json(const CertificateReport& report) {
  return {
      {"verdict", std::string(to_string(report.verdict))},
      {"taus", report.taus},
      {"lmin_full", report.lmin_full},
      {"lmin_reduced", report.lmin_reduced},
      {"dual_bound", report.dual_bound},
      {"tol_psd", report.tol_psd},
      {"tol_tau", report.tol_tau},
      {"asymmetry", report.asymmetry},
      {"null_residual", report.null_residual},
  };
}

json solve_report_to_json(const SolveReport& report, const CertificateReport* cert, bool include_trace) {
  json doc;
  doc["objective"] = report.final_objective();
  doc["initial_objective"] = report.initial_objective();
  doc["iterations"] = report.iterations;
  doc["stop_reason"] = std::string(to_string(report.stop_reason));
  if (std::isinf(report.alpha)) {
    doc["alpha"] = "inf";
  } else {
    doc["alpha"] = report.alpha;
  }
  doc["stationarity"] = {
      {"max_gradient_residual", report.stationarity.max_gradient_residual},
      {"max_asymmetry", report.stationarity.max_asymmetry},
  };
  if (cert != nullptr) doc["certificate"] = certificate_to_json(*cert);
  if (include_trace) {
    doc["objective_trace"] = report.objective_trace;
    doc["mean_change_trace"] = report.mean_change_trace;
  }
  return doc;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError(path, "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(path, "rename failed");
  }
}

void write_json_atomic(const std::filesystem::path& path, const json& doc) {
  write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace otsm::cli
