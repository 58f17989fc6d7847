#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "reg3d/errors.hpp"
#include "reg3d/point_cloud.hpp"

namespace reg3d {
namespace {

struct Property {
  std::string name;
  std::string type;
  bool is_list = false;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

std::size_t scalar_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  if (type == "int" || type == "uint" || type == "int32" || type == "uint32" ||
      type == "float" || type == "float32")
    return 4;
  if (type == "double" || type == "float64") return 8;
  throw ParseError("ply: unknown property type '" + type + "'");
}

double decode_scalar(const char* bytes, const std::string& type) {
  auto load = [&](auto value) {
    std::memcpy(&value, bytes, sizeof(value));
    return static_cast<double>(value);
  };
  switch (scalar_size(type)) {
    case 1:
      return (type[0] == 'c' || type == "int8") ? load(std::int8_t{}) : load(std::uint8_t{});
    case 2:
      return (type[0] == 's' || type == "int16") ? load(std::int16_t{}) : load(std::uint16_t{});
    case 4:
      if (type == "float" || type == "float32") return load(float{});
      return (type == "int" || type == "int32") ? load(std::int32_t{}) : load(std::uint32_t{});
    default:
      return load(double{});
  }
}

std::string next_line(std::istream& in, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("ply: unexpected end of header at line " + std::to_string(line_no));
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

PointCloud load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("ply: cannot open '" + path + "'");

  std::size_t line_no = 0;
  if (next_line(in, line_no) != "ply") throw ParseError("ply: missing magic at line 1");

  bool binary = false;
  bool format_seen = false;
  std::vector<Element> elements;
  for (;;) {
    const std::string line = next_line(in, line_no);
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "comment" || kw == "obj_info" || kw.empty()) continue;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else if (fmt == "binary_big_endian")
        throw UnsupportedFormat("ply: big-endian files are not supported");
      else throw ParseError("ply: unknown format '" + fmt + "' at line " + std::to_string(line_no));
      format_seen = true;
    } else if (kw == "element") {
      Element e;
      if (!(ls >> e.name >> e.count))
        throw ParseError("ply: malformed element at line " + std::to_string(line_no));
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty())
        throw ParseError("ply: property before element at line " + std::to_string(line_no));
      Property p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.is_list = true;
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        p.type = item_type;
      } else {
        p.type = t;
        ls >> p.name;
      }
      if (p.name.empty())
        throw ParseError("ply: malformed property at line " + std::to_string(line_no));
      elements.back().properties.push_back(p);
    } else if (kw == "end_header") {
      break;
    } else {
      throw ParseError("ply: unknown header keyword '" + kw + "' at line " + std::to_string(line_no));
    }
  }
  if (!format_seen) throw ParseError("ply: header has no format line");

  const auto vertex_it = std::find_if(elements.begin(), elements.end(),
                                      [](const Element& e) { return e.name == "vertex"; });
  if (vertex_it == elements.end()) throw ParseError("ply: no vertex element");
  const Element& vertex = *vertex_it;
  if (vertex.count == 0) throw ParseError("ply: vertex element is empty");

  int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
  for (std::size_t i = 0; i < vertex.properties.size(); ++i) {
    const Property& p = vertex.properties[i];
    if (p.is_list) throw UnsupportedFormat("ply: list property in vertex element");
    const int idx = static_cast<int>(i);
    if (p.name == "x") ix = idx;
    else if (p.name == "y") iy = idx;
    else if (p.name == "z") iz = idx;
    else if (p.name == "nx") inx = idx;
    else if (p.name == "ny") iny = idx;
    else if (p.name == "nz") inz = idx;
  }
  if (ix < 0 || iy < 0 || iz < 0) throw ParseError("ply: vertex element lacks x/y/z");
  const bool with_normals = inx >= 0 && iny >= 0 && inz >= 0;

  std::vector<Vector3> points;
  std::vector<Vector3> normals;
  points.reserve(vertex.count);
  if (with_normals) normals.reserve(vertex.count);

  if (!binary) {
    for (const Element& e : elements) {
      if (e.name == "vertex") break;
      for (std::size_t i = 0; i < e.count; ++i) next_line(in, line_no);
    }
    for (std::size_t v = 0; v < vertex.count; ++v) {
      std::string line;
      if (!std::getline(in, line))
        throw ParseError("ply: truncated vertex data at line " + std::to_string(line_no + 1));
      ++line_no;
      std::istringstream ls(line);
      std::vector<double> vals(vertex.properties.size());
      for (double& d : vals)
        if (!(ls >> d))
          throw ParseError("ply: malformed vertex at line " + std::to_string(line_no));
      points.emplace_back(vals[ix], vals[iy], vals[iz]);
      if (with_normals) normals.emplace_back(vals[inx], vals[iny], vals[inz]);
    }
  } else {
    const std::size_t data_start = static_cast<std::size_t>(in.tellg());
    // Skip any elements stored ahead of the vertices.
    for (const Element& e : elements) {
      if (e.name == "vertex") break;
      std::size_t row = 0;
      for (const Property& p : e.properties) {
        if (p.is_list)
          throw UnsupportedFormat("ply: list property ahead of vertex data");
        row += scalar_size(p.type);
      }
      in.seekg(static_cast<std::streamoff>(row * e.count), std::ios::cur);
    }

    std::vector<std::size_t> offsets(vertex.properties.size());
    std::size_t stride = 0;
    for (std::size_t i = 0; i < vertex.properties.size(); ++i) {
      offsets[i] = stride;
      stride += scalar_size(vertex.properties[i].type);
    }
    std::vector<char> row(stride);
    for (std::size_t v = 0; v < vertex.count; ++v) {
      in.read(row.data(), static_cast<std::streamsize>(stride));
      if (static_cast<std::size_t>(in.gcount()) != stride) {
        const std::size_t offset = data_start + v * stride + static_cast<std::size_t>(in.gcount());
        throw ParseError("ply: truncated binary data at offset " + std::to_string(offset));
      }
      auto prop = [&](int i) {
        return decode_scalar(row.data() + offsets[static_cast<std::size_t>(i)],
                             vertex.properties[static_cast<std::size_t>(i)].type);
      };
      points.emplace_back(prop(ix), prop(iy), prop(iz));
      if (with_normals) normals.emplace_back(prop(inx), prop(iny), prop(inz));
    }
  }

  return PointCloud(std::move(points), std::move(normals));
}

void save_ply(const std::string& path, const PointCloud& cloud, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("ply: cannot write '" + path + "'");
  out << "ply\n"
      << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n")
      << "element vertex " << cloud.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_normals())
    out << "property double nx\nproperty double ny\nproperty double nz\n";
  out << "end_header\n";

  char buf[96];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vector3& p = cloud[i];
    if (binary) {
      double row[6] = {p.x(), p.y(), p.z(), 0, 0, 0};
      std::size_t n = 3;
      if (cloud.has_normals()) {
        const Vector3& m = cloud.normals()[i];
        row[3] = m.x();
        row[4] = m.y();
        row[5] = m.z();
        n = 6;
      }
      out.write(reinterpret_cast<const char*>(row), static_cast<std::streamsize>(n * sizeof(double)));
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", p.x(), p.y(), p.z());
      out << buf;
      if (cloud.has_normals()) {
        const Vector3& m = cloud.normals()[i];
        std::snprintf(buf, sizeof(buf), " %.17g %.17g %.17g", m.x(), m.y(), m.z());
        out << buf;
      }
      out << "\n";
    }
  }
  if (!out) throw IoError("ply: write failed for '" + path + "'");
}

}  // namespace reg3d
