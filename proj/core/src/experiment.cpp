#include "otsm/experiment.hpp"

#include <atomic>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "otsm/builders.hpp"

namespace otsm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct RunRecord {
  bool failed = false;
  double objective = 0.0;
  int iterations = 0;
  StopReason stop = StopReason::MaxIter;
  Verdict verdict = Verdict::Inconclusive;
};

std::vector<RunRecord> run_rep(const ExperimentGrid& grid, Index d, double sigma, int rep) {
  std::vector<RunRecord> records(grid.inits.size());
  const SyntheticProcrustes synth =
      synth_procrustes(grid.m, grid.n, d, grid.r, sigma, derive_seed(grid.seed, d, sigma, rep));
  for (std::size_t k = 0; k < grid.inits.size(); ++k) {
    RunRecord& rec = records[k];
    try {
      SolverConfig config = grid.solver;
      if (grid.inits[k] == InitKind::Identity) {
        config.init = IdentityInit{};
      } else {
        config.init = SpectralInit{};
      }
      const SolveReport solved = solve(synth.problem, config);
      rec.objective = solved.final_objective();
      rec.iterations = solved.iterations;
      rec.stop = solved.stop_reason;
      rec.verdict = certify(synth.problem, solved.solution, grid.tolerances).verdict;
    } catch (const std::exception&) {
      rec.failed = true;
    }
  }
  return records;
}

// Quotes a CSV field when it contains a delimiter, quote, or line break.
std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

}  // namespace

std::string_view to_string(InitKind init) {
  return init == InitKind::Identity ? "identity" : "spectral";
}

InitKind parse_init_kind(std::string_view text) {
  if (text == "identity") return InitKind::Identity;
  if (text == "spectral") return InitKind::Spectral;
  throw ValidationError("unknown init strategy '" + std::string(text) + "'");
}

void ExperimentGrid::validate() const {
  if (m < 2 || n < 1 || r < 1) throw ValidationError("ExperimentGrid: m, n, r out of range");
  if (reps < 1) throw ValidationError("ExperimentGrid: reps must be at least 1");
  if (d_values.empty() || sigma_values.empty() || inits.empty()) {
    throw ValidationError("ExperimentGrid: empty d, sigma, or init list");
  }
  for (Index d : d_values) {
    if (d < r) throw ValidationError("ExperimentGrid: every d must be at least r");
  }
  for (double s : sigma_values) {
    if (!(s > 0.0)) throw ValidationError("ExperimentGrid: sigma values must be positive");
  }
  solver.validate();
}

std::uint64_t derive_seed(std::uint64_t base, Index d, double sigma, int rep) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ static_cast<std::uint64_t>(d));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(sigma));
  return splitmix64(h ^ static_cast<std::uint64_t>(rep));
}

std::vector<CellResult> run_grid(const ExperimentGrid& grid) {
  grid.validate();

  struct Job {
    Index d;
    double sigma;
    int rep;
  };
  std::vector<Job> jobs;
  for (Index d : grid.d_values) {
    for (double sigma : grid.sigma_values) {
      for (int rep = 0; rep < grid.reps; ++rep) jobs.push_back({d, sigma, rep});
    }
  }

  std::vector<std::vector<RunRecord>> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      records[k] = run_rep(grid, jobs[k].d, jobs[k].sigma, jobs[k].rep);
    }
  };
  const unsigned threads = std::max(1u, grid.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  const auto spectral_index = [&]() -> std::ptrdiff_t {
    for (std::size_t k = 0; k < grid.inits.size(); ++k) {
      if (grid.inits[k] == InitKind::Spectral) return static_cast<std::ptrdiff_t>(k);
    }
    return -1;
  }();
  const auto identity_index = [&]() -> std::ptrdiff_t {
    for (std::size_t k = 0; k < grid.inits.size(); ++k) {
      if (grid.inits[k] == InitKind::Identity) return static_cast<std::ptrdiff_t>(k);
    }
    return -1;
  }();

  std::vector<CellResult> results;
  std::size_t job = 0;
  for (Index d : grid.d_values) {
    for (double sigma : grid.sigma_values) {
      const std::size_t first = job;
      job += static_cast<std::size_t>(grid.reps);
      for (std::size_t k = 0; k < grid.inits.size(); ++k) {
        CellResult cell;
        cell.d = d;
        cell.sigma = sigma;
        cell.init = grid.inits[k];
        double iter_sum = 0.0;
        double obj_sum = 0.0;
        for (std::size_t j = first; j < job; ++j) {
          const RunRecord& rec = records[j][k];
          if (rec.failed) {
            ++cell.failures;
            continue;
          }
          iter_sum += rec.iterations;
          obj_sum += rec.objective;
          if (rec.stop == StopReason::Converged) ++cell.converged;
          switch (rec.verdict) {
            case Verdict::CertifiedGlobal:
              ++cell.certified;
              break;
            case Verdict::Inconclusive:
              ++cell.inconclusive;
              break;
            case Verdict::CertifiedNotGlobal:
              ++cell.not_global;
              if (rec.stop == StopReason::Converged) ++cell.not_global_converged;
              break;
          }
          if (rec.verdict != Verdict::CertifiedGlobal && spectral_index >= 0 &&
              identity_index >= 0) {
            const RunRecord& s = records[j][static_cast<std::size_t>(spectral_index)];
            const RunRecord& i = records[j][static_cast<std::size_t>(identity_index)];
            if (!s.failed && !i.failed) {
              cell.objective_gap_records.push_back(s.objective - i.objective);
            }
          }
        }
        const int ok = cell.runs();
        if (ok > 0) {
          cell.mean_iterations = iter_sum / ok;
          cell.mean_final_objective = obj_sum / ok;
        }
        results.push_back(std::move(cell));
      }
    }
  }
  return results;
}

void write_results_csv(const std::vector<CellResult>& results, std::ostream& out) {
  out << kResultsHeader << '\n';
  std::ostringstream row;
  row.precision(17);
  for (const auto& cell : results) {
    row.str("");
    row << cell.d << ',' << cell.sigma << ',' << csv_field(to_string(cell.init)) << ','
        << cell.certified << ',' << cell.inconclusive << ',' << cell.not_global << ','
        << cell.mean_iterations << ',' << cell.mean_final_objective << '\n';
    out << row.str();
  }
}

void export_results(const std::vector<CellResult>& results, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    write_results_csv(results, out);
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

std::vector<CellResult> parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("results CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw ValidationError("results CSV: unexpected header");
  std::vector<CellResult> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) {
      throw ValidationError("results CSV: line " + std::to_string(lineno) + " has " +
                            std::to_string(f.size()) + " fields");
    }
    try {
      CellResult cell;
      cell.d = static_cast<Index>(std::stoll(f[0]));
      cell.sigma = std::stod(f[1]);
      cell.init = parse_init_kind(f[2]);
      cell.certified = std::stoi(f[3]);
      cell.inconclusive = std::stoi(f[4]);
      cell.not_global = std::stoi(f[5]);
      cell.mean_iterations = std::stod(f[6]);
      cell.mean_final_objective = std::stod(f[7]);
      out.push_back(std::move(cell));
    } catch (const std::logic_error&) {
      throw ValidationError("results CSV: malformed number on line " + std::to_string(lineno));
    }
  }
  return out;
}

}  // namespace otsm
