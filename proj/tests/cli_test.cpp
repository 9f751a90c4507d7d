#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "tpms/io.hpp"

namespace tpms {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace oracle;

struct Outcome {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("tpms_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  Outcome run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && '" TPMS_FORGE_CLI_PATH "' " + args + " > '" + out.string() +
                            "' 2> '" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
  }

  fs::path dir_;
};

TEST_F(Cli, ListSurfaces) {
  const Outcome r = run("list-surfaces");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  // One header line, then a row per surface.
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header.rfind("surface", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) rows += !line.empty();
  EXPECT_EQ(rows, 16);
  EXPECT_NE(r.out.find("gyroid"), std::string::npos);
}

TEST_F(Cli, ListSurfacesJson) {
  const Outcome r = run("list-surfaces --json");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), 16u);
  for (const json& row : j) EXPECT_TRUE(row.contains("name") && row.contains("symmetry"));
}

TEST_F(Cli, UnknownFlagIsUsageError) {
  const Outcome r = run("list-surfaces --sparkles");
  EXPECT_NE(r.exit_code, 0);
  EXPECT_FALSE(r.err.empty());
  EXPECT_NE(run("frobnicate").exit_code, 0);
}

TEST_F(Cli, GenNetworkGyroid) {
  const Outcome r = run("gen --surface gyroid --period 50 --mode network --iso 0.0 -o brick.stl");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  ASSERT_TRUE(fs::exists(dir_ / "brick.stl"));
  const json report = json::parse(slurp(dir_ / "brick.report.json"));
  EXPECT_EQ(report["watertight"], true);
  const TriangleMesh m = read_mesh_file(dir_ / "brick.stl");
  EXPECT_TRUE(closed_two_manifold_edges(m));
  EXPECT_EQ(fs::file_size(dir_ / "brick.stl"), 84u + 50u * m.triangles.size());
}

TEST_F(Cli, GenDensityTarget) {
  const Outcome r = run("gen --surface schwarz_p --target-density 0.5 --resolution 64 -o p.obj --format obj");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json report = json::parse(slurp(dir_ / "p.report.json"));
  EXPECT_NEAR(report["relative_density"].get<double>(), 0.5, 0.005);
  EXPECT_TRUE(closed_two_manifold_edges(read_mesh_file(dir_ / "p.obj")));
}

TEST_F(Cli, GenStrictLongPeriod) {
  const Outcome loose = run("gen --surface gyroid --period 400 -o loose.stl");
  EXPECT_EQ(loose.exit_code, 0) << loose.err;
  const Outcome r = run("gen --surface gyroid --period 400 --strict -o brick.stl");
  EXPECT_EQ(r.exit_code, 2) << r.err;
  EXPECT_NE(r.err.find("MULTI_COMPONENT"), std::string::npos);
  EXPECT_GT(vertex_components(read_mesh_file(dir_ / "brick.stl")), 1);
}

TEST_F(Cli, GenErrorsExitOne) {
  const Outcome r = run("gen --surface torus -o x.stl");
  EXPECT_EQ(r.exit_code, 1);
  const Outcome big = run("gen --domain 300 150 200 -o x.stl");
  EXPECT_EQ(big.exit_code, 1);
  EXPECT_EQ(big.err.rfind("EnvelopeExceeded: ", 0), 0u) << big.err;
}

TEST_F(Cli, GenFromConfigWithOverride) {
  std::ofstream(dir_ / "spec.json") << R"({"surface":"diamond","resolution":32,"mode":{"type":"network","iso":0}})";
  const Outcome r = run("gen --config spec.json --base 4 -o d.stl");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const TriangleMesh m = read_mesh_file(dir_ / "d.stl");
  EXPECT_TRUE(closed_two_manifold_edges(m));
}

TEST_F(Cli, Solve) {
  const Outcome r = run("solve --surface gyroid --target-density 0.3 --resolution 48");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["converged"], true);
  EXPECT_NEAR(j["achieved"].get<double>(), 0.3, 0.005);
}

TEST_F(Cli, InspectCube) {
  write_mesh_file(box_mesh(Vec3::Zero(), Vec3::Constant(3)), dir_ / "cube.stl", ExportFormat::stl_binary);
  const Outcome r = run("inspect cube.stl");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["surface_area"].get<double>(), 6 * 9.0, 1e-9);
  EXPECT_EQ(j["watertight"], true);
  EXPECT_TRUE(j["relative_density"].is_null());
  EXPECT_TRUE(j["min_wall_mm"].is_null());
}

TEST_F(Cli, InspectOpenMesh) {
  TriangleMesh open = box_mesh(Vec3::Zero(), Vec3::Ones());
  open.triangles.pop_back();
  write_mesh_file(open, dir_ / "open.obj", ExportFormat::obj);
  const Outcome r = run("inspect open.obj");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["watertight"], false);
}

TEST_F(Cli, InspectGarbage) {
  std::ofstream(dir_ / "junk.stl", std::ios::binary) << "\x01\x02 definitely not a mesh";
  const Outcome r = run("inspect junk.stl");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.err.rfind("Malformed: ", 0), 0u) << r.err;
}

}  // namespace
}  // namespace tpms
