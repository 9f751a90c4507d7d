// tpms-forge: lattice brick generator, mesh inspector and local HTTP service.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tpms/brick.hpp"
#include "tpms/io.hpp"
#include "tpms/service.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitWarnings = 2;

// Spec flags shared by gen and solve. Unset flags leave the config file (or
// the defaults) alone.
struct SpecFlags {
  std::string config;
  std::optional<std::string> surface;
  std::vector<double> period;
  std::vector<double> phase;
  std::optional<double> strut_radius;
  std::optional<std::string> mode;
  std::optional<double> iso;
  std::optional<double> thickness;
  std::optional<double> target_density;
  std::optional<std::string> density_solid;
  std::optional<double> target_wall;
  std::optional<double> tol;
  std::vector<double> domain;
  std::optional<double> base;
  std::vector<int> resolution;
  std::optional<double> nozzle;
  bool allow_oversize = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config, "BrickSpec JSON file; flags override its fields")->check(CLI::ExistingFile);
    cmd.add_option("--surface", surface, "surface kind (see list-surfaces)");
    cmd.add_option("--period", period, "period length in mm, one value or three")->expected(1, 3);
    cmd.add_option("--phase", phase, "phase offset in periods, three values")->expected(3);
    cmd.add_option("--strut-radius", strut_radius, "strut radius for skeletal kinds, in periods");
    cmd.add_option("--mode", mode, "network or sheet")->check(CLI::IsMember({"network", "sheet"}));
    cmd.add_option("--iso", iso, "network iso-level");
    cmd.add_option("--thickness", thickness, "sheet half-thickness in field units");
    cmd.add_option("--target-density", target_density, "solve the level for this relative density");
    cmd.add_option("--density-solid", density_solid, "solid style for --target-density")
        ->check(CLI::IsMember({"network", "sheet"}));
    cmd.add_option("--target-wall", target_wall, "solve the sheet thickness for this wall (mm)");
    cmd.add_option("--tol", tol, "solver tolerance (density units, or mm for walls)");
    cmd.add_option("--domain", domain, "domain size in mm, three values")->expected(3);
    cmd.add_option("--base", base, "base plate height in mm");
    cmd.add_option("--resolution", resolution, "samples on the longest axis, or three counts")->expected(1, 3);
    cmd.add_option("--nozzle", nozzle, "nozzle diameter in mm");
    cmd.add_flag("--allow-oversize", allow_oversize, "permit domains beyond the print envelope");
  }

  tpms::BrickSpec resolve() const {
    json j = json::object();
    if (!config.empty()) {
      std::ifstream in(config);
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw tpms::Error(tpms::ErrorCode::InvalidSpec, config + ": " + e.what());
      }
      if (!j.is_object()) throw tpms::Error(tpms::ErrorCode::InvalidSpec, config + ": expected a JSON object");
    }
    if (surface) j["surface"] = *surface;
    if (!period.empty()) j["period_mm"] = period.size() == 1 ? json(period[0]) : json(period);
    if (!phase.empty()) j["phase_offset"] = phase;
    if (strut_radius) j["strut_radius"] = *strut_radius;
    if (!domain.empty()) j["domain_mm"] = domain;
    if (base) j["base_mm"] = *base;
    if (!resolution.empty()) {
      if (resolution.size() == 2) throw tpms::Error(tpms::ErrorCode::InvalidSpec, "--resolution takes 1 or 3 values");
      j["resolution"] = resolution.size() == 1 ? json(resolution[0]) : json(resolution);
    }
    if (nozzle) j["nozzle_mm"] = *nozzle;
    if (allow_oversize) j["allow_oversize"] = true;

    if (target_density && target_wall) {
      throw tpms::Error(tpms::ErrorCode::InvalidSpec, "--target-density and --target-wall are exclusive");
    }
    json previous = j.value("mode", json::object());
    if (target_density) {
      j["mode"] = {{"type", "density"}, {"target", *target_density}, {"solid", density_solid.value_or("network")}};
      if (tol) j["mode"]["tol"] = *tol;
    } else if (target_wall) {
      j["mode"] = {{"type", "wall"}, {"target_mm", *target_wall}};
      if (tol) j["mode"]["tol_mm"] = *tol;
    } else if (mode || iso || thickness) {
      const std::string type = mode.value_or(thickness ? "sheet" : "network");
      if (type == "network") {
        j["mode"] = {{"type", "network"}, {"iso", iso.value_or(previous.value("iso", 0.0))}};
      } else {
        const auto t = thickness ? std::optional<double>(*thickness)
                                 : (previous.contains("thickness") ? previous["thickness"].get<double>()
                                                                   : std::optional<double>());
        if (!t) throw tpms::Error(tpms::ErrorCode::InvalidSpec, "sheet mode needs --thickness");
        j["mode"] = {{"type", "sheet"}, {"thickness", *t}};
      }
    } else if (tol && previous.is_object() && previous.contains("type")) {
      j["mode"][previous["type"] == "wall" ? "tol_mm" : "tol"] = *tol;
    }
    return tpms::brick_spec_from_json(j);
  }
};

int list_surfaces(bool as_json) {
  json rows = json::array();
  for (tpms::SurfaceKind kind : tpms::kAllSurfaces) {
    const tpms::SymmetryInfo info = tpms::symmetry_descriptor(kind);
    rows.push_back({{"name", tpms::surface_name(kind)},
                    {"triply_periodic", info.triply_periodic},
                    {"symmetry", tpms::symmetry_name(info.symmetry)}});
  }
  if (as_json) {
    std::cout << rows.dump(2) << '\n';
    return kExitOk;
  }
  std::printf("%-14s %-9s %s\n", "surface", "periodic", "symmetry");
  for (const json& row : rows) {
    std::printf("%-14s %-9s %s\n", row["name"].get<std::string>().c_str(),
                row["triply_periodic"].get<bool>() ? "xyz" : "xy",
                row["symmetry"].get<std::string>().c_str());
  }
  return kExitOk;
}

int gen(const SpecFlags& flags, const std::string& output, const std::string& format_flag, bool strict) {
  const tpms::BrickSpec spec = flags.resolve();
  std::optional<tpms::ExportFormat> format;
  if (format_flag.empty()) {
    const std::string ext = std::filesystem::path(output).extension().string();
    format = ext == ".obj" ? tpms::ExportFormat::obj : tpms::ExportFormat::stl_binary;
  } else {
    format = tpms::parse_format(format_flag);
    if (!format) throw tpms::Error(tpms::ErrorCode::InvalidArgument, "unknown format '" + format_flag + "'");
  }

  const tpms::BrickResult result = tpms::build_brick(spec);
  tpms::write_mesh_file(result.mesh, output, *format);
  const auto sidecar = tpms::report_sidecar_path(output);
  tpms::write_report_file(result.report, sidecar);

  std::cout << "wrote " << output << " (" << result.mesh.triangles.size() << " triangles) and "
            << sidecar.string() << '\n';
  if (result.solve) std::cout << "solve: " << tpms::to_json(*result.solve).dump() << '\n';

  const tpms::MeshReport& r = result.report;
  for (const std::string& code : r.warnings) {
    std::cerr << code << ": ";
    if (code == tpms::warning::kThinWall) {
      std::cerr << "min wall " << r.min_wall_mm.value_or(0.0) << " mm is below " << 2.0 * spec.nozzle_mm << " mm";
    } else if (code == tpms::warning::kOverhang) {
      std::cerr << "overhang area fraction " << r.overhang_area_fraction << " exceeds " << tpms::kOverhangLimit;
    } else if (code == tpms::warning::kMultiComponent) {
      std::cerr << r.component_count << " disconnected components";
    } else if (code == tpms::warning::kEnvelope) {
      std::cerr << "mesh bounding box exceeds the domain";
    } else {
      std::cerr << "mesh is not closed";
    }
    std::cerr << '\n';
  }
  return strict && !r.warnings.empty() ? kExitWarnings : kExitOk;
}

int solve(const SpecFlags& flags) {
  const tpms::SolveResult result = tpms::solve_brick(flags.resolve());
  std::cout << tpms::to_json(result).dump(2) << '\n';
  return result.converged ? kExitOk : kExitError;
}

int inspect(const std::string& path) {
  const tpms::TriangleMesh mesh = tpms::read_mesh_file(path);
  std::cout << tpms::to_json(tpms::measure_mesh(mesh)).dump(2) << '\n';
  return kExitOk;
}

int serve(const std::string& host, int port, unsigned workers) {
  tpms::Service::Options options;
  if (workers > 0) options.workers = workers;
  tpms::Service service(options);
  tpms::HttpServer server(service);
  const int bound = server.bind(host, port);
  std::cout << "listening on http://" << host << ':' << bound << std::endl;
  server.listen();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TPMS lattice brick generator"};
  app.require_subcommand(1);

  bool list_json = false;
  auto* list_cmd = app.add_subcommand("list-surfaces", "list the available surface kinds");
  list_cmd->add_flag("--json", list_json, "print a JSON array");

  SpecFlags gen_flags;
  std::string output;
  std::string format;
  bool strict = false;
  auto* gen_cmd = app.add_subcommand("gen", "build a brick and write mesh plus report");
  gen_flags.attach(*gen_cmd);
  gen_cmd->add_option("-o,--output", output, "mesh output path")->required();
  gen_cmd->add_option("--format", format, "stl, stl_ascii or obj (default from extension)");
  gen_cmd->add_flag("--strict", strict, "exit 2 when constraint warnings are raised");

  SpecFlags solve_flags;
  auto* solve_cmd = app.add_subcommand("solve", "run only the density or wall solver");
  solve_flags.attach(*solve_cmd);

  std::string inspect_path;
  auto* inspect_cmd = app.add_subcommand("inspect", "print the report of an STL or OBJ file");
  inspect_cmd->add_option("path", inspect_path, "mesh file")->required();

  std::string host = "127.0.0.1";
  int port = 8080;
  unsigned workers = 0;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP API");
  serve_cmd->add_option("--bind", host, "bind address");
  serve_cmd->add_option("--port", port, "port, 0 for any free port");
  serve_cmd->add_option("--workers", workers, "concurrent builds (default: processor count)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; every usage error maps onto the generic error code.
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*list_cmd) return list_surfaces(list_json);
    if (*gen_cmd) return gen(gen_flags, output, format, strict);
    if (*solve_cmd) return solve(solve_flags);
    if (*inspect_cmd) return inspect(inspect_path);
    if (*serve_cmd) return serve(host, port, workers);
  } catch (const tpms::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
