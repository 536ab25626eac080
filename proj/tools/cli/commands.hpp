#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace otsm::cli {

/// Process exit codes. Files and these codes are the machine contract.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitMaxIter = 2,
  kExitInconclusive = 3,
  kExitNotGlobal = 4,
  kExitDemoFailed = 5,
};

struct SolveOptions {
  std::filesystem::path input;
  std::filesystem::path out;
  /// Defaults to <out stem>.solution.json next to the report.
  std::optional<std::filesystem::path> solution_out;
  /// A number, or "inf" for the unsafe non-proximal mode.
  std::string alpha = "1000";
  double tol = 1e-5;
  int max_iter = 2000;
  /// "identity", "spectral", or "file:PATH".
  std::string init = "identity";
  bool certify = false;
  bool trace = false;
};

struct CertifyOptions {
  std::filesystem::path input;
  std::filesystem::path solution;
  std::filesystem::path out;
};

struct BenchOptions {
  long m = 5;
  long n = 100;
  long r = 3;
  std::vector<long> d{5, 10, 20};
  std::vector<double> sigma{0.1, 10.0};
  int reps = 20;
  std::uint64_t seed = 20190101;
  unsigned threads = 1;
  std::filesystem::path out;
};

struct ExampleOptions {
  long d = 3;
  long r = 2;
  std::filesystem::path out;
};

std::filesystem::path default_solution_path(const std::filesystem::path& report);

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);
int cmd_certify(const CertifyOptions& opts, std::ostream& out, std::ostream& err);
int cmd_demo_oscillation(std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);
/// Writes the three-block hard example as a problem file.
int cmd_example_hard(const ExampleOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace otsm::cli
