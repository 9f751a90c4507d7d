#include "tpms/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include "tpms/error.hpp"

namespace tpms {
namespace {

constexpr std::size_t kHeaderBytes = 80;
constexpr std::size_t kTriangleBytes = 50;
constexpr char kHeaderTag[] = "tpms-forge";

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + b])) << (8 * b);
  return v;
}

void check_sink(const std::ostream& sink, const char* what) {
  if (!sink) throw Error(ErrorCode::SinkError, std::string("failed writing ") + what);
}

using FloatKey = std::array<std::uint32_t, 3>;

// Shares vertices whose float bits are identical, in first-seen order.
class ExactWelder {
 public:
  int add(float x, float y, float z) {
    const FloatKey key{std::bit_cast<std::uint32_t>(x), std::bit_cast<std::uint32_t>(y),
                       std::bit_cast<std::uint32_t>(z)};
    auto [it, inserted] = index_.try_emplace(key, static_cast<int>(mesh.vertices.size()));
    if (inserted) mesh.vertices.emplace_back(x, y, z);
    return it->second;
  }

  TriangleMesh mesh;

 private:
  std::map<FloatKey, int> index_;
};

std::string read_all(std::istream& source) {
  return {std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
}

std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

Vec3 facet_normal(const TriangleMesh& mesh, const Vec3i& tri) {
  const Vec3 n = triangle_normal(mesh, tri);
  return n.allFinite() ? n : Vec3::Zero();
}

}  // namespace

std::string_view format_name(ExportFormat format) {
  switch (format) {
    case ExportFormat::stl_binary: return "stl_binary";
    case ExportFormat::stl_ascii: return "stl_ascii";
    case ExportFormat::obj: return "obj";
  }
  return "stl_binary";
}

std::optional<ExportFormat> parse_format(std::string_view name) {
  if (name == "stl" || name == "stl_binary") return ExportFormat::stl_binary;
  if (name == "stl_ascii") return ExportFormat::stl_ascii;
  if (name == "obj") return ExportFormat::obj;
  return std::nullopt;
}

std::string stl_binary_bytes(const TriangleMesh& mesh) {
  std::string out;
  out.reserve(kHeaderBytes + 4 + kTriangleBytes * mesh.triangles.size());
  out.append(kHeaderTag);
  out.resize(kHeaderBytes, '\0');
  put_u32(out, static_cast<std::uint32_t>(mesh.triangles.size()));
  for (const Vec3i& tri : mesh.triangles) {
    const Vec3 n = facet_normal(mesh, tri);
    for (int a = 0; a < 3; ++a) put_f32(out, static_cast<float>(n[a]));
    for (int c = 0; c < 3; ++c) {
      const Vec3& v = mesh.vertices[tri[c]];
      for (int a = 0; a < 3; ++a) put_f32(out, static_cast<float>(v[a]));
    }
    out.append(2, '\0');
  }
  return out;
}

std::size_t write_stl_binary(const TriangleMesh& mesh, std::ostream& sink) {
  const std::string bytes = stl_binary_bytes(mesh);
  sink.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  check_sink(sink, "binary STL");
  return bytes.size();
}

TriangleMesh read_stl_binary(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes + 4) {
    throw Error(ErrorCode::Malformed, "binary STL shorter than its 84-byte header");
  }
  const std::uint64_t count = get_u32(bytes, kHeaderBytes);
  const std::uint64_t expected = kHeaderBytes + 4 + kTriangleBytes * count;
  if (expected != bytes.size()) {
    throw Error(ErrorCode::Malformed, "binary STL declares " + std::to_string(count) + " triangles (" +
                                          std::to_string(expected) + " bytes) but has " +
                                          std::to_string(bytes.size()) + " bytes");
  }
  ExactWelder welder;
  welder.mesh.triangles.reserve(count);
  std::size_t at = kHeaderBytes + 4;
  for (std::uint64_t t = 0; t < count; ++t, at += kTriangleBytes) {
    Vec3i tri;
    for (int c = 0; c < 3; ++c) {
      const std::size_t base = at + 12 + 12 * c;
      tri[c] = welder.add(std::bit_cast<float>(get_u32(bytes, base)), std::bit_cast<float>(get_u32(bytes, base + 4)),
                          std::bit_cast<float>(get_u32(bytes, base + 8)));
    }
    welder.mesh.triangles.push_back(tri);
  }
  return std::move(welder.mesh);
}

TriangleMesh read_stl_binary(std::istream& source) {
  const std::string bytes = read_all(source);
  return read_stl_binary(std::string_view(bytes));
}

std::size_t write_stl_ascii(const TriangleMesh& mesh, std::ostream& sink) {
  std::size_t lines = 0;
  sink << "solid " << kHeaderTag << '\n';
  ++lines;
  for (const Vec3i& tri : mesh.triangles) {
    const Vec3 n = facet_normal(mesh, tri);
    sink << "  facet normal " << format_g9(n.x()) << ' ' << format_g9(n.y()) << ' ' << format_g9(n.z()) << '\n'
         << "    outer loop\n";
    for (int c = 0; c < 3; ++c) {
      const Vec3& v = mesh.vertices[tri[c]];
      sink << "      vertex " << format_g9(static_cast<float>(v.x())) << ' ' << format_g9(static_cast<float>(v.y()))
           << ' ' << format_g9(static_cast<float>(v.z())) << '\n';
    }
    sink << "    endloop\n  endfacet\n";
    lines += 7;
  }
  sink << "endsolid " << kHeaderTag << '\n';
  check_sink(sink, "ASCII STL");
  return lines + 1;
}

TriangleMesh read_stl_ascii(std::istream& source) {
  ExactWelder welder;
  std::string word;
  if (!(source >> word) || word != "solid") throw Error(ErrorCode::Malformed, "ASCII STL must start with 'solid'");
  std::string rest;
  std::getline(source, rest);
  std::vector<int> corners;
  while (source >> word) {
    if (word == "vertex") {
      float x, y, z;
      if (!(source >> x >> y >> z)) throw Error(ErrorCode::Malformed, "bad vertex record in ASCII STL");
      corners.push_back(welder.add(x, y, z));
    } else if (word == "endloop") {
      if (corners.size() != 3) throw Error(ErrorCode::Malformed, "ASCII STL facet without exactly 3 vertices");
      welder.mesh.triangles.emplace_back(corners[0], corners[1], corners[2]);
      corners.clear();
    } else if (word == "endsolid") {
      return std::move(welder.mesh);
    }
  }
  throw Error(ErrorCode::Malformed, "ASCII STL missing 'endsolid'");
}

std::size_t write_obj(const TriangleMesh& mesh, std::ostream& sink) {
  for (const Vec3& v : mesh.vertices) {
    sink << "v " << format_g9(v.x()) << ' ' << format_g9(v.y()) << ' ' << format_g9(v.z()) << '\n';
  }
  for (const Vec3i& t : mesh.triangles) {
    sink << "f " << t.x() + 1 << ' ' << t.y() + 1 << ' ' << t.z() + 1 << '\n';
  }
  check_sink(sink, "OBJ");
  return mesh.vertices.size() + mesh.triangles.size();
}

TriangleMesh read_obj(std::istream& source) {
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  auto malformed = [&line_no](const std::string& what) {
    return Error(ErrorCode::Malformed, "OBJ line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(source, line)) {
    ++line_no;
    std::istringstream in(line);
    std::string tag;
    if (!(in >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(in >> x >> y >> z)) throw malformed("bad vertex");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string ref;
      while (in >> ref) {
        long idx = 0;
        try {
          idx = std::stol(ref.substr(0, ref.find('/')));
        } catch (const std::exception&) {
          throw malformed("bad face index '" + ref + "'");
        }
        const long n = static_cast<long>(mesh.vertices.size());
        const long resolved = idx > 0 ? idx - 1 : n + idx;
        if (idx == 0 || resolved < 0 || resolved >= n) throw malformed("face index out of range");
        poly.push_back(static_cast<int>(resolved));
      }
      if (poly.size() < 3) throw malformed("face with fewer than 3 vertices");
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.triangles.emplace_back(poly[0], poly[k], poly[k + 1]);
    }
  }
  return mesh;
}

std::size_t write_mesh(const TriangleMesh& mesh, std::ostream& sink, ExportFormat format) {
  switch (format) {
    case ExportFormat::stl_binary: return write_stl_binary(mesh, sink);
    case ExportFormat::stl_ascii: return write_stl_ascii(mesh, sink);
    case ExportFormat::obj: return write_obj(mesh, sink);
  }
  return 0;
}

void write_mesh_file(const TriangleMesh& mesh, const std::filesystem::path& path, ExportFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::SinkError, "cannot open " + path.string() + " for writing");
  write_mesh(mesh, out, format);
  out.flush();
  check_sink(out, path.string().c_str());
}

TriangleMesh read_mesh_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Malformed, "cannot open " + path.string());
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".obj") return read_obj(in);

  const std::string bytes = read_all(in);
  const bool binary_length_ok =
      bytes.size() >= kHeaderBytes + 4 &&
      kHeaderBytes + 4 + kTriangleBytes * static_cast<std::uint64_t>(get_u32(bytes, kHeaderBytes)) == bytes.size();
  // Some binary writers also start the header with "solid", so a consistent
  // length wins over the keyword.
  if (!binary_length_ok && bytes.rfind("solid", 0) == 0) {
    std::istringstream text(bytes);
    return read_stl_ascii(text);
  }
  return read_stl_binary(std::string_view(bytes));
}

std::filesystem::path report_sidecar_path(const std::filesystem::path& mesh_path) {
  std::filesystem::path out = mesh_path;
  out.replace_extension(".report.json");
  return out;
}

void write_report_file(const MeshReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::SinkError, "cannot open " + path.string() + " for writing");
  out << to_json(report).dump(2) << '\n';
  out.flush();
  check_sink(out, path.string().c_str());
}

}  // namespace tpms
