#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbffd/driver.hpp"

namespace rbffd {
namespace {

namespace fs = std::filesystem;

RunConfig parse_str(const std::string& doc) {
  std::istringstream in(doc);
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  EXPECT_TRUE(in.good()) << p;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / tag) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

TEST(Config, ParsesFullDocument) {
  RunConfig c = parse_str(
      "# comment\n"
      "case = annulus_plastic\n"
      "approach = hybrid\n"
      "p = 2\n"
      "alpha_s = 0.5\n"
      "alpha_d = 0.5\n"
      "h = 0.05\n"
      "seed = 2\n"
      "e_tol = 1e-7\n"
      "nri_max = 70\n"
      "threads = 2\n");
  EXPECT_EQ(c.case_id, "annulus_plastic");
  EXPECT_EQ(c.approach, Approach::hybrid);
  EXPECT_DOUBLE_EQ(c.alpha_s, 0.5);
  EXPECT_EQ(c.seed, 2ull);
  EXPECT_EQ(c.threads, 2);
  NewtonOptions n = c.newton();
  EXPECT_DOUBLE_EQ(n.tol, 1e-7);
  EXPECT_EQ(n.max_iters, 70);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_str("case = annulus\nbogus_key = 1\n"), ConfigError);
  EXPECT_THROW(parse_str("case = annulus\nh = 0.1\nh = 0.2\n"), ConfigError);  // duplicate
  EXPECT_THROW(parse_str("h = 0.1\n"), ConfigError);                           // missing case
  EXPECT_THROW(parse_str("case = annulus\napproach = magic\n"), ConfigError);
  EXPECT_THROW(parse_str("case = annulus\nh = 0.1abc\n"), ConfigError);
  EXPECT_THROW(parse_str("case = annulus\np = 2.5\n"), ConfigError);
  EXPECT_THROW(parse_str("case = annulus\nno equals sign\n"), ConfigError);
  EXPECT_THROW(parse_str("case = annulus\nh = -0.1\n"), ConfigError);
  EXPECT_THROW(parse_str("case = nonexistent\n"), ConfigError);
  EXPECT_THROW(parse_str("case = annulus\nresidual_rows = some\n"), ConfigError);
  EXPECT_THROW(parse_str("case = annulus\nplane_mode = 3d\n"), ConfigError);
  // plane-stress plasticity is not implemented and must be refused up front
  EXPECT_THROW(parse_str("case = annulus_plastic\nplane_mode = plane_stress\n"), ConfigError);
  // load program must be consistent
  EXPECT_THROW(parse_str("case = annulus\np_min = 1\np_max = 0\ndp = 0.5\n"), ConfigError);
}

TEST(Config, ClampsExcessiveVirtualStencilOffset) {
  RunConfig c = parse_str("case = annulus\napproach = hybrid\np_fd = 4\nalpha_d = 0.9\n");
  EXPECT_DOUBLE_EQ(c.alpha_d, 0.5);
  ASSERT_FALSE(c.warnings.empty());
  EXPECT_NE(c.warnings.front().find("clamped"), std::string::npos);
}

TEST(Config, EchoRoundTrips) {
  RunConfig c;
  c.case_id = "plate_hole_plastic";
  c.approach = Approach::hybrid;
  c.p = 3;
  c.alpha_s = 0.25;
  c.h = 0.15;
  c.seed = 9;
  c.p_min = 0.0;
  c.p_max = 0.1;
  c.dp = 0.01;
  c.sigma_y0 = 0.1;
  c.H = 0.25;
  c.sweep_h = {0.2, 0.1};
  c.sweep_approach = {Approach::composed, Approach::hybrid};
  std::stringstream ss;
  echo_config(ss, c);
  RunConfig back = parse_config(ss);
  EXPECT_EQ(back.case_id, c.case_id);
  EXPECT_EQ(back.approach, c.approach);
  EXPECT_EQ(back.p, c.p);
  EXPECT_DOUBLE_EQ(back.alpha_s, c.alpha_s);
  EXPECT_DOUBLE_EQ(back.h, c.h);
  EXPECT_EQ(back.seed, c.seed);
  ASSERT_TRUE(back.dp.has_value());
  EXPECT_DOUBLE_EQ(*back.dp, *c.dp);
  ASSERT_TRUE(back.H.has_value());
  EXPECT_DOUBLE_EQ(*back.H, *c.H);
  ASSERT_EQ(back.sweep_h.size(), 2u);
  EXPECT_DOUBLE_EQ(back.sweep_h[1], 0.1);
  ASSERT_EQ(back.sweep_approach.size(), 2u);
  EXPECT_EQ(back.sweep_approach[1], Approach::hybrid);
}

RunConfig small_elastic_config() {
  return parse_str(
      "case = annulus\n"
      "approach = hybrid\n"
      "alpha_s = 0.5\n"
      "h = 0.15\n"
      "seed = 2\n");
}

TEST(Driver, SolveWritesArtifactsDeterministically) {
  RunConfig cfg = small_elastic_config();
  TempDir d1("rbffd_cli_a"), d2("rbffd_cli_b");
  ASSERT_EQ(run_solve(cfg, d1.path.string()), 0);
  ASSERT_EQ(run_solve(cfg, d2.path.string()), 0);
  for (const char* name : {"nodes.txt", "effective_config.txt", "report.csv", "field_0001.txt"}) {
    SCOPED_TRACE(name);
    ASSERT_TRUE(fs::exists(d1.path / name));
    const std::string a = slurp(d1.path / name), b = slurp(d2.path / name);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b);  // byte-identical across reruns with the same seed
  }
  // The field dump carries one row per node with the documented columns.
  std::istringstream field(slurp(d1.path / "field_0001.txt"));
  std::string header;
  std::getline(field, header);
  EXPECT_EQ(header, "# x y u1 u2 s11 s22 s33 s12 epbar");
  int rows = 0;
  for (std::string line; std::getline(field, line);)
    if (!line.empty()) ++rows;
  BenchmarkCase bc = cfg.make_configured_case();
  EXPECT_EQ(rows, generate_nodes(bc.domain, cfg.seed).size());
  // The effective config echo is itself parseable.
  EXPECT_NO_THROW(parse_config_file((d1.path / "effective_config.txt").string()));
}

TEST(Driver, SolveReturnsErrorCodeWhenNewtonStalls) {
  RunConfig cfg = small_elastic_config();
  cfg.e_tol = 1e-30;
  cfg.nri_max = 2;
  TempDir d("rbffd_cli_fail");
  EXPECT_EQ(run_solve(cfg, d.path.string()), 2);
  // Partial artifacts are still written for postmortem use.
  EXPECT_TRUE(fs::exists(d.path / "nodes.txt"));
  EXPECT_TRUE(fs::exists(d.path / "report.csv"));
}

TEST(Driver, GenNodesWritesParseableCloud) {
  RunConfig cfg = small_elastic_config();
  TempDir d("rbffd_cli_gen");
  ASSERT_EQ(run_gen_nodes(cfg, d.path.string()), 0);
  std::istringstream nodes(slurp(d.path / "nodes.txt"));
  std::string line;
  int count = 0;
  while (std::getline(nodes, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x, y, nx, ny;
    int kind, tag;
    ASSERT_TRUE(ls >> x >> y >> kind >> nx >> ny >> tag) << line;
    EXPECT_GE(kind, 0);
    EXPECT_LE(kind, 2);
    ++count;
  }
  EXPECT_GT(count, 100);
}

TEST(Driver, SweepWritesCsv) {
  RunConfig cfg = parse_str(
      "case = annulus\n"
      "approach = composed\n"
      "sweep_h = 0.15, 0.12\n"
      "seed = 3\n");
  TempDir d("rbffd_cli_sweep");
  ASSERT_EQ(run_sweep_cmd(cfg, d.path.string()), 0);
  const std::string csv = slurp(d.path / "sweep.csv");
  EXPECT_NE(csv.find("case,approach,h,"), std::string::npos);
  EXPECT_NE(csv.find("# slopes"), std::string::npos);
}

TEST(Driver, BuiltInCheckPasses) {
  testing::internal::CaptureStdout();
  int rc = run_check(7);
  std::string out = testing::internal::GetCapturedStdout();
  EXPECT_EQ(rc, 0);
  EXPECT_NE(out.find("all checks passed"), std::string::npos);
}

}  // namespace
}  // namespace rbffd
