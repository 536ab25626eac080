#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/io.hpp"
#include "support/oracles.hpp"

namespace otsm::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("otsm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path write(const std::string& name, const json& doc) const { return write(name, doc.dump()); }

  static json read(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path hard_file() const { return write("hard.json", problem_to_json(hard_example(3, 2))); }

  int solve(SolveOptions opts) {
    out_.str("");
    err_.str("");
    return cmd_solve(opts, out_, err_);
  }

  int certify(const fs::path& problem, const fs::path& solution, const fs::path& report) {
    out_.str("");
    err_.str("");
    return cmd_certify({problem, solution, report}, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

json blocks_json(const std::vector<Matrix>& blocks) {
  json b = json::array();
  for (const auto& m : blocks) b.push_back(matrix_to_json(m));
  return {{"blocks", b}};
}

TEST_F(CliTest, SolveHardExampleSpectral) {
  SolveOptions o;
  o.input = hard_file();
  o.out = path("rep.json");
  o.init = "spectral";
  o.certify = true;
  o.trace = true;
  const int code = solve(o);
  EXPECT_EQ(code, kExitOk) << err_.str();
  const json rep = read(o.out);
  EXPECT_NEAR(rep["objective"].get<double>(), 3.0, 1e-4);
  EXPECT_EQ(rep["stop_reason"], "converged");
  ASSERT_TRUE(rep.contains("certificate"));
  EXPECT_EQ(rep["certificate"]["taus"].size(), 3u);
  EXPECT_NEAR(rep["certificate"]["dual_bound"].get<double>(), 3.0, 1e-10);
  EXPECT_EQ(rep["objective_trace"].size(), rep["iterations"].get<std::size_t>() + 1);

  // The report objective matches the objective recomputed from the solution file.
  const OtsmProblem p = hard_example(3, 2);
  std::ostringstream warn;
  const BlockOrthogonal x = load_solution(default_solution_path(o.out), p.dims(), warn);
  EXPECT_NEAR(objective(p, x), rep["objective"].get<double>(), 1e-10);
  EXPECT_TRUE(warn.str().empty());

  // The verdict in the report is the one certify gives on the written solution.
  EXPECT_EQ(rep["certificate"]["verdict"], std::string(to_string(otsm::certify(p, x).verdict)));
}

TEST_F(CliTest, SolveHardExampleIdentityIsStuck) {
  SolveOptions o;
  o.input = hard_file();
  o.out = path("rep.json");
  EXPECT_EQ(solve(o), kExitOk);
  const json rep = read(o.out);
  EXPECT_NEAR(rep["objective"].get<double>(), 2.0, 1e-12);
  EXPECT_EQ(rep["iterations"], 1);
  EXPECT_EQ(rep["stop_reason"], "converged");
  EXPECT_FALSE(rep.contains("certificate"));
  EXPECT_FALSE(rep.contains("objective_trace"));
}

TEST_F(CliTest, ReportRoundTripsExactly) {
  SolveOptions o;
  o.input = hard_file();
  o.out = path("rep.json");
  o.init = "spectral";
  o.trace = true;
  o.max_iter = 40;
  EXPECT_EQ(solve(o), kExitMaxIter);
  SolverConfig config;
  config.init = SpectralInit{};
  config.max_iter = 40;
  const SolveReport direct = otsm::solve(hard_example(3, 2), config);
  const json rep = read(o.out);
  EXPECT_EQ(rep["objective"].get<double>(), direct.final_objective());
  EXPECT_EQ(rep["objective_trace"].get<std::vector<double>>(), direct.objective_trace);
  EXPECT_EQ(rep["stop_reason"], "max_iter");
}

TEST_F(CliTest, SolveWithFileInitAndSolutionOut) {
  const auto start = write("start.json", blocks_json({testing::eye32(), testing::swap32(), testing::eye32()}));
  SolveOptions o;
  o.input = hard_file();
  o.out = path("rep.json");
  o.solution_out = path("sol.json");
  o.init = "file:" + start.string();
  EXPECT_EQ(solve(o), kExitOk);
  EXPECT_TRUE(fs::exists(path("sol.json")));
  EXPECT_EQ(read(o.out)["iterations"], 1);
  EXPECT_NEAR(read(o.out)["objective"].get<double>(), 2.0, 1e-12);
}

TEST_F(CliTest, InfiniteAlphaWarns) {
  SolveOptions o;
  o.input = hard_file();
  o.out = path("rep.json");
  o.alpha = "inf";
  EXPECT_EQ(solve(o), kExitOk);
  EXPECT_NE(err_.str().find("not guaranteed to converge"), std::string::npos);
  EXPECT_EQ(read(o.out)["alpha"], "inf");
}

TEST_F(CliTest, SolveInputErrors) {
  SolveOptions o;
  o.out = path("rep.json");

  o.input = path("missing.json");
  EXPECT_EQ(solve(o), kExitInputError);
  EXPECT_NE(err_.str().find("cannot open"), std::string::npos);

  o.input = write("bad.json", std::string("{\"dims\": [2, 2], "));
  EXPECT_EQ(solve(o), kExitInputError);
  EXPECT_NE(err_.str().find("malformed JSON"), std::string::npos);

  o.input = write("shape.json", json{{"dims", {2, 3}}, {"r", 1}, {"S", {{{"i", 1}, {"j", 2}, {"data", {{1, 2}, {3, 4}}}}}}});
  EXPECT_EQ(solve(o), kExitInputError);
  EXPECT_NE(err_.str().find("S[0].data"), std::string::npos);

  o.input = write("norank.json", json{{"dims", {2, 2}}, {"S", json::array()}});
  EXPECT_EQ(solve(o), kExitInputError);
  EXPECT_NE(err_.str().find(": r: missing"), std::string::npos);

  o.input = write("both.json", json{{"dims", {1, 1}}, {"r", 1}, {"S", json::array()}, {"views", json::array()}});
  EXPECT_EQ(solve(o), kExitInputError);

  o.input = write("order.json", json{{"dims", {2, 2}}, {"r", 1}, {"S", {{{"i", 2}, {"j", 1}, {"data", {{1, 0}, {0, 1}}}}}}});
  EXPECT_EQ(solve(o), kExitInputError);
  EXPECT_NE(err_.str().find("S[0]"), std::string::npos);

  o.input = hard_file();
  o.alpha = "-3";
  EXPECT_EQ(solve(o), kExitInputError);
  EXPECT_NE(err_.str().find("--alpha"), std::string::npos);
  o.alpha = "1000";
  o.init = "random";
  EXPECT_EQ(solve(o), kExitInputError);
  EXPECT_NE(err_.str().find("--init"), std::string::npos);

  EXPECT_FALSE(fs::exists(o.out));
  EXPECT_FALSE(fs::exists(default_solution_path(o.out)));
}

TEST_F(CliTest, ViewsFileBuildsMaxdiff) {
  std::mt19937_64 rng(3);
  const Matrix a = testing::gaussian(10, 3, rng);
  const Matrix b = testing::gaussian(10, 3, rng);
  const auto file = write("views.json", json{{"r", 2}, {"views", {matrix_to_json(a), matrix_to_json(b)}}});
  const OtsmProblem p = load_problem(file);
  EXPECT_LE((p.block(0, 1) - a.transpose() * b).norm(), 1e-12);
  EXPECT_EQ(p.dims().rank(), 2);
}

TEST_F(CliTest, ProblemFileRoundTrip) {
  std::mt19937_64 rng(5);
  OtsmProblem::BlockMap blocks;
  blocks[{0, 2}] = testing::gaussian(2, 4, rng);
  blocks[{1, 2}] = testing::gaussian(3, 4, rng);
  const OtsmProblem p(BlockDims({2, 3, 4}, 2), blocks);
  const OtsmProblem back = load_problem(write("p.json", problem_to_json(p)));
  EXPECT_EQ(back.dims(), p.dims());
  EXPECT_EQ(assemble_stilde(back), assemble_stilde(p));
}

TEST_F(CliTest, CertifyExitCodes) {
  const auto hard = hard_file();
  EXPECT_EQ(certify(hard, write("opt.json", blocks_json(testing::hard_optimum())), path("c1.json")), kExitOk);
  for (double t : read(path("c1.json"))["certificate"]["taus"]) EXPECT_NEAR(t, 1.0, 1e-12);

  EXPECT_EQ(certify(hard, write("osc.json", blocks_json({testing::eye32(), testing::swap32(), testing::eye32()})),
                    path("c2.json")),
            kExitInconclusive);
  EXPECT_EQ(read(path("c2.json"))["certificate"]["verdict"], "inconclusive");

  const auto m2 = write("m2.json", json{{"dims", {2, 2}}, {"r", 2}, {"S", {{{"i", 1}, {"j", 2}, {"data", {{-1, 0}, {0, -1}}}}}}});
  const Matrix eye = Matrix::Identity(2, 2);
  EXPECT_EQ(certify(m2, write("ii.json", blocks_json({eye, eye})), path("c3.json")), kExitNotGlobal);
  EXPECT_NEAR(read(path("c3.json"))["certificate"]["taus"][0].get<double>(), -1.0, 1e-12);
}

TEST_F(CliTest, SolutionOrthonormalityThresholds) {
  const auto hard = hard_file();
  auto opt = testing::hard_optimum();
  opt[0](0, 0) += 1e-6;
  EXPECT_EQ(certify(hard, write("warn.json", blocks_json(opt)), path("c.json")), kExitOk) << err_.str();
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
  EXPECT_NE(err_.str().find("blocks[0]"), std::string::npos);

  opt[0](0, 0) += 1e-3;
  EXPECT_EQ(certify(hard, write("bad.json", blocks_json(opt)), path("d.json")), kExitInputError);
  EXPECT_NE(err_.str().find("not orthonormal"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("d.json")));

  EXPECT_EQ(certify(hard, write("few.json", blocks_json({testing::eye32()})), path("e.json")), kExitInputError);
  EXPECT_NE(err_.str().find("blocks"), std::string::npos);
}

TEST_F(CliTest, DemoOscillationIsDeterministic) {
  std::ostringstream a, b, err;
  EXPECT_EQ(cmd_demo_oscillation(a, err), kExitOk);
  EXPECT_EQ(cmd_demo_oscillation(b, err), kExitOk);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("objective: 2 2 2 2\n"), std::string::npos);
  EXPECT_NE(a.str().find("iterate 3:"), std::string::npos);
  EXPECT_EQ(a.str().find("FAILED"), std::string::npos);
  EXPECT_TRUE(err.str().empty());
}

TEST_F(CliTest, BenchRowsAndDeterminism) {
  BenchOptions o;
  o.reps = 1;
  o.d = {5};
  o.sigma = {0.1};
  o.out = path("a.csv");
  EXPECT_EQ(cmd_bench(o, out_, err_), kExitOk);
  o.out = path("b.csv");
  EXPECT_EQ(cmd_bench(o, out_, err_), kExitOk);
  const std::string text = slurp(path("a.csv"));
  EXPECT_EQ(text, slurp(path("b.csv")));
  std::istringstream in(text);
  const auto rows = parse_results_csv(in);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) EXPECT_EQ(row.certified, 1);
}

TEST_F(CliTest, BenchErrors) {
  BenchOptions o;
  o.reps = 1;
  o.d = {5};
  o.sigma = {0.1};
  o.out = path("nodir") / "x.csv";
  EXPECT_EQ(cmd_bench(o, out_, err_), kExitInputError);
  o.out = path("x.csv");
  o.d = {2};
  EXPECT_EQ(cmd_bench(o, out_, err_), kExitInputError);
  EXPECT_FALSE(fs::exists(o.out));
}

TEST_F(CliTest, ExampleHard) {
  ExampleOptions o;
  o.out = path("h.json");
  EXPECT_EQ(cmd_example_hard(o, out_, err_), kExitOk);
  EXPECT_EQ(assemble_stilde(load_problem(o.out)), assemble_stilde(hard_example(3, 2)));
  o.r = 4;
  EXPECT_EQ(cmd_example_hard(o, out_, err_), kExitInputError);
}

}  // namespace
}  // namespace otsm::cli
