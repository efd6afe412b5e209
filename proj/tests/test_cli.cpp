#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pmedian/pmedian.hpp"
#include "pmedian_cli/dataset.hpp"
#include "pmedian_cli/report.hpp"
#include "pmedian_cli/run.hpp"

using namespace pmedian;
using namespace pmedian::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() / "pmedian_cli_tests" / (std::string(info->test_suite_name()) + "_" + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pmedian");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

const char* kMixedRecord =
    R"({"weight": 2, "factors": [{"type":"euclidean","value":[0.5,-1]},{"type":"positive","value":1.25},)"
    R"({"type":"sphere","value":[0.6,0.8,0]},{"type":"spd_bw","value":[2,0.3,0.3,1]}]})";

}  // namespace

TEST(Dataset, ParsesAllFactorTypes) {
  std::istringstream in(std::string(kMixedRecord) + "\n\n" + kMixedRecord + "\n");
  const WeightedSample s = read_dataset(in);
  ASSERT_EQ(s.size(), 2);
  EXPECT_EQ(s.manifold().size(), 4);
  EXPECT_EQ(s.manifold().factor(0).kind(), FactorKind::Euclidean);
  EXPECT_EQ(s.manifold().factor(1).kind(), FactorKind::PositiveHalfLine);
  EXPECT_EQ(s.manifold().factor(2).kind(), FactorKind::Sphere);
  EXPECT_EQ(s.manifold().factor(3).kind(), FactorKind::SpdBuresWasserstein);
  EXPECT_DOUBLE_EQ(s.weight(0), 0.5);
  EXPECT_EQ(s.point(0).components[3].spd().matrix()(0, 1), 0.3);
}

TEST(Dataset, ErrorsReportLineNumbers) {
  const std::vector<std::pair<std::string, int>> cases{
      {std::string(kMixedRecord) + "\n{not json\n", 2},
      {"\n" + std::string(kMixedRecord) + "\n" + R"({"factors":[{"type":"euclidean","value":[1,2]}]})", 3},
      {R"({"factors":[{"type":"sphere","value":[1,1,0]}]})", 1},
      {R"({"factors":[{"type":"spd_bw","value":[1,2,0,1]}]})", 1},
      {R"({"factors":[{"type":"spd_bw","value":[1,0,0]}]})", 1},
      {R"({"factors":[{"type":"positive","value":-1}]})", 1},
      {R"({"factors":[{"type":"torus","value":[1]}]})", 1},
      {R"({"weight":-1,"factors":[{"type":"euclidean","value":[1]}]})", 1},
      {R"({"weight":1})", 1},
  };
  for (const auto& [text, line] : cases) {
    std::istringstream in(text);
    try {
      read_dataset(in);
      ADD_FAILURE() << text;
    } catch (const DatasetError& e) {
      EXPECT_EQ(e.line(), line) << text << ": " << e.what();
    }
  }
  std::istringstream empty("\n\n");
  EXPECT_THROW(read_dataset(empty), DatasetError);
}

TEST(Dataset, WriteReadRoundTripIsExact) {
  std::istringstream in(std::string(kMixedRecord) + "\n" +
                        R"({"weight": 0.1, "factors": [{"type":"euclidean","value":[0.1,0.7]},{"type":"positive","value":0.3},)"
                        R"({"type":"sphere","value":[0,0.6,0.8]},{"type":"spd_bw","value":[1.1,0,0,0.7]}]})");
  const WeightedSample s = read_dataset(in);
  std::stringstream buf;
  write_dataset(buf, s);
  const WeightedSample back = read_dataset(buf);
  for (int i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s.manifold().dist(s.point(i), back.point(i)), 0.0);
    EXPECT_EQ(s.weight(i), back.weight(i));
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Config, FlagsOverrideFileAndUnknownKeysFail) {
  const fs::path dir = scratch_dir();
  write_file(dir / "cfg.json", R"({"command":"sweep-univariate","n":50,"trials":4,"seed":3,"method":"weiszfeld"})");
  std::ostringstream sink;
  const std::string cfg = (dir / "cfg.json").string();
  std::vector<const char*> argv{"pmedian", "--config", cfg.c_str(), "--trials", "2", "--alphas", "0,0.1"};
  const auto c = parse_command_line(static_cast<int>(argv.size()), argv.data(), sink);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(*c->command, Command::SweepUnivariate);
  EXPECT_EQ(*c->n, 50);
  EXPECT_EQ(*c->trials, 2);
  EXPECT_EQ(c->seed, 3u);
  EXPECT_EQ(c->solver.method, SolverMethod::Weiszfeld);
  EXPECT_EQ(*c->alphas, (std::vector<double>{0.0, 0.1}));
  EXPECT_THROW(apply_config_json({}, nlohmann::json{{"bogus", 1}}), ConfigError);
  EXPECT_THROW(apply_config_json({}, nlohmann::json{{"n", "many"}}), ConfigError);
  EXPECT_THROW(parse_number_list("0,,1"), ConfigError);
  EXPECT_THROW(parse_number_list("0,x"), ConfigError);
}

TEST(Run, BadConfigExitCodes) {
  const fs::path dir = scratch_dir();
  const std::string out = (dir / "o").string();
  EXPECT_EQ(invoke({}).code, kBadConfig);
  EXPECT_EQ(invoke({"bogus"}).code, kBadConfig);
  EXPECT_EQ(invoke({"median", "--out", out}).code, kBadConfig);
  EXPECT_EQ(invoke({"sweep-univariate", "--alphas", "0.6", "--out", out}).code, kBadConfig);
  EXPECT_EQ(invoke({"sweep-univariate", "--method", "newton", "--out", out}).code, kBadConfig);
  EXPECT_EQ(invoke({"breakdown", "--wi", "0.5", "--out", out}).code, kBadConfig);
  EXPECT_EQ(invoke({"median", "--config", (dir / "missing.json").string()}).code, kBadConfig);
  const Outcome o = invoke({"sweep-univariate", "--n", "0", "--out", out});
  EXPECT_EQ(o.code, kBadConfig);
  const auto record = nlohmann::json::parse(first_line(o.err));
  EXPECT_EQ(record["code"], 2);
  EXPECT_EQ(record["status"], "error");
}

TEST(Run, BadDatasetReportsLine) {
  const fs::path dir = scratch_dir();
  write_file(dir / "d.jsonl", std::string(kMixedRecord) + "\n" + R"({"factors":[]})" + "\n");
  const Outcome o = invoke({"median", "--input", (dir / "d.jsonl").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(o.code, kBadDataset);
  const auto record = nlohmann::json::parse(first_line(o.err));
  EXPECT_EQ(record["line"], 2);
  EXPECT_EQ(record["kind"], "bad_dataset");
  EXPECT_EQ(invoke({"mean", "--input", (dir / "nope.jsonl").string(), "--out", (dir / "o").string()}).code,
            kBadDataset);
}

TEST(Run, MedianOfSinglePointIsThatPoint) {
  const fs::path dir = scratch_dir();
  write_file(dir / "one.jsonl", std::string(kMixedRecord) + "\n");
  const Outcome o = invoke({"median", "--input", (dir / "one.jsonl").string(), "--out", (dir / "o").string()});
  ASSERT_EQ(o.code, kOk) << o.err;
  const WeightedSample in = read_dataset_file((dir / "one.jsonl").string());
  const WeightedSample out = read_dataset_file((dir / "o" / "median.jsonl").string());
  EXPECT_EQ(in.manifold().dist(in.point(0), out.point(0)), 0.0);
  EXPECT_TRUE(fs::exists(dir / "o" / "trace.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
  EXPECT_EQ(manifest["version"], kVersion);
  EXPECT_EQ(manifest["command"], "median");
  EXPECT_TRUE(manifest["config"].contains("method"));
}

TEST(Run, MedianOutputRoundTrips) {
  const fs::path dir = scratch_dir();
  Rng rng(91);
  std::vector<ProductPoint> pts;
  for (int i = 0; i < 15; ++i) pts.push_back(sample_multivariate(DrawKind::Signal, 3, 0.5, rng));
  const WeightedSample s = WeightedSample::uniform(multivariate_gaussian_manifold(3), pts);
  {
    std::ofstream f(dir / "mv.jsonl");
    write_dataset(f, s);
  }
  ASSERT_EQ(invoke({"median", "--input", (dir / "mv.jsonl").string(), "--out", (dir / "o").string()}).code, kOk);
  const WeightedSample back = read_dataset_file((dir / "o" / "median.jsonl").string());
  const SolverReport direct = solve_median(s, SolverConfig{});
  EXPECT_LE(s.manifold().dist(back.point(0), direct.minimizer), 1e-12);
  const std::string trace = slurp(dir / "o" / "trace.csv");
  EXPECT_EQ(first_line(trace), kTraceHeader);
  ASSERT_EQ(invoke({"mean", "--input", (dir / "mv.jsonl").string(), "--out", (dir / "m").string()}).code, kOk);
  const WeightedSample mean = read_dataset_file((dir / "m" / "mean.jsonl").string());
  EXPECT_LE(s.manifold().dist(mean.point(0), product_mean(s)), 1e-12);
}

TEST(Run, SweepIsByteIdenticalAndSchemaStable) {
  const fs::path dir = scratch_dir();
  const std::vector<std::string> base{"sweep-univariate", "--n", "80", "--trials", "2", "--alphas", "0,0.2,0.4",
                                      "--seed", "17", "--svg", "true"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", (dir / "a").string()});
  b.insert(b.end(), {"--out", (dir / "b").string()});
  ASSERT_EQ(invoke(a).code, kOk);
  ASSERT_EQ(invoke(b).code, kOk);
  const std::string csv = slurp(dir / "a" / "sweep.csv");
  EXPECT_EQ(csv, slurp(dir / "b" / "sweep.csv"));
  EXPECT_EQ(first_line(csv), "alpha,trial,estimator,error,termination");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 2 * 2);
  const std::string svg = slurp(dir / "a" / "sweep.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  size_t polylines = 0;
  for (size_t pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
  EXPECT_EQ(polylines, 2u);
  EXPECT_NE(svg.find("frechet_mean"), std::string::npos);
}

TEST(Run, BreakdownMajorityIsMonotone) {
  const fs::path dir = scratch_dir();
  ASSERT_EQ(invoke({"breakdown", "--wi", "0.6", "--radii", "0,10,100,1000", "--out", dir.string()}).code, kOk);
  std::istringstream csv(slurp(dir / "breakdown.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "R,distance");
  double prev = -1.0;
  int rows = 0;
  while (std::getline(csv, line)) {
    const double d = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GT(d, prev);
    prev = d;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST(Run, PerturbationSchema) {
  const fs::path dir = scratch_dir();
  ASSERT_EQ(invoke({"perturbation", "--epsilons", "0,1e-4,1e-2", "--trials", "3", "--out", dir.string()}).code, kOk);
  const std::string csv = slurp(dir / "perturbation.csv");
  EXPECT_EQ(first_line(csv), "epsilon,displacement");
  EXPECT_NE(csv.find("\n0,0\n"), std::string::npos);
}

TEST(Run, ThreadEnvironmentVariable) {
  const fs::path dir = scratch_dir();
  ::setenv("PRODUCT_MEDIAN_THREADS", "zero", 1);
  EXPECT_EQ(invoke({"sweep-univariate", "--n", "20", "--trials", "1", "--alphas", "0", "--out", dir.string()}).code,
            kBadConfig);
  ::setenv("PRODUCT_MEDIAN_THREADS", "2", 1);
  EXPECT_LE(resolve_thread_count(), 2);
  ::unsetenv("PRODUCT_MEDIAN_THREADS");
  EXPECT_GE(resolve_thread_count(), 1);
}

TEST(Report, SvgEscapesAndScales) {
  Series s{"a<b", "#000", {0, 1, 2}, {1, 4, 9}};
  const std::string svg = line_chart_svg("t&t", "x", "y", {s});
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
  EXPECT_NE(svg.find("t&amp;t"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}
