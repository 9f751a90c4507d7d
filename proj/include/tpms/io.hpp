#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "tpms/mesh.hpp"
#include "tpms/metrics.hpp"

namespace tpms {

enum class ExportFormat { stl_binary, stl_ascii, obj };

std::string_view format_name(ExportFormat format);
/// Accepts "stl", "stl_binary", "stl_ascii" and "obj".
std::optional<ExportFormat> parse_format(std::string_view name);

/// 80-byte header, uint32 count, then per triangle 12 float32 (unit normal,
/// v0, v1, v2) and a zero attribute word, all little-endian regardless of host.
/// Returns the bytes written, 84 + 50 * T. Throws Error(SinkError).
std::size_t write_stl_binary(const TriangleMesh& mesh, std::ostream& sink);
std::string stl_binary_bytes(const TriangleMesh& mesh);

/// Vertices are shared only when their float bits match exactly.
/// Throws Error(Malformed) when the length disagrees with the count.
TriangleMesh read_stl_binary(std::istream& source);
TriangleMesh read_stl_binary(std::string_view bytes);

/// Returns the number of lines written.
std::size_t write_stl_ascii(const TriangleMesh& mesh, std::ostream& sink);
TriangleMesh read_stl_ascii(std::istream& source);

/// "v x y z" lines, then "f a b c" with 1-based indices, 9 significant digits.
/// Returns the number of lines written.
std::size_t write_obj(const TriangleMesh& mesh, std::ostream& sink);
/// Reads v/f records; polygons are fanned, texture and normal refs ignored.
TriangleMesh read_obj(std::istream& source);

std::size_t write_mesh(const TriangleMesh& mesh, std::ostream& sink, ExportFormat format);
void write_mesh_file(const TriangleMesh& mesh, const std::filesystem::path& path, ExportFormat format);

/// Picks the reader from the extension, then sniffs STL binary vs ASCII.
TriangleMesh read_mesh_file(const std::filesystem::path& path);

/// brick.stl -> brick.report.json
std::filesystem::path report_sidecar_path(const std::filesystem::path& mesh_path);
void write_report_file(const MeshReport& report, const std::filesystem::path& path);

}  // namespace tpms
