#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "otsm/certificate.hpp"
#include "otsm/solver.hpp"

namespace otsm {

enum class InitKind { Identity, Spectral };

std::string_view to_string(InitKind init);
/// Parses "identity" or "spectral"; throws ValidationError otherwise.
InitKind parse_init_kind(std::string_view text);

/// Failure to read or write an experiment file.
class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Synthetic Procrustes study over a (d, sigma) grid at fixed m, n, r.
struct ExperimentGrid {
  Index m = 5;
  Index n = 100;
  Index r = 3;
  std::vector<Index> d_values{5, 10, 20};
  std::vector<double> sigma_values{0.1, 10.0};
  int reps = 20;
  std::uint64_t seed = 20190101;
  std::vector<InitKind> inits{InitKind::Identity, InitKind::Spectral};
  /// alpha, tol and max_iter are taken from here; init is overridden per run.
  SolverConfig solver{};
  CertificateTolerances tolerances{};
  /// Worker threads; results do not depend on this value.
  unsigned threads = 1;

  void validate() const;
};

/// Aggregate over the reps of one (d, sigma, init) cell.
struct CellResult {
  Index d = 0;
  double sigma = 0.0;
  InitKind init = InitKind::Identity;
  int certified = 0;
  int inconclusive = 0;
  int not_global = 0;
  /// CertifiedNotGlobal verdicts among runs that stopped with Converged.
  int not_global_converged = 0;
  int converged = 0;
  /// Runs that threw; excluded from the verdict counts.
  int failures = 0;
  double mean_iterations = 0.0;
  double mean_final_objective = 0.0;
  /// f(spectral) - f(identity) for each rep where this init was not certified.
  std::vector<double> objective_gap_records;

  int runs() const { return certified + inconclusive + not_global; }
  double certified_fraction() const {
    return runs() == 0 ? 0.0 : static_cast<double>(certified) / runs();
  }
};

/// Per-rep seed mixed from the base seed and the cell coordinates.
std::uint64_t derive_seed(std::uint64_t base, Index d, double sigma, int rep);

/// Results ordered by d, then sigma, then init, as listed in the grid.
std::vector<CellResult> run_grid(const ExperimentGrid& grid);

inline constexpr std::string_view kResultsHeader =
    "d,sigma,init,certified,inconclusive,not_global,mean_iter,mean_final_objective";

void write_results_csv(const std::vector<CellResult>& results, std::ostream& out);

/// Writes via a temporary file and an atomic rename. Throws IoError.
void export_results(const std::vector<CellResult>& results, const std::filesystem::path& path);

/// Reads the CSV schema back; only the exported fields are populated.
std::vector<CellResult> parse_results_csv(std::istream& in);

}  // namespace otsm
