#ifndef GLR_IO_HPP
#define GLR_IO_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "glr/types.hpp"

namespace glr {

enum class CloudFormat { PlyAscii, PlyBinaryLE, Xyz };

struct CloudFile {
    CloudFormat format = CloudFormat::PlyBinaryLE;
    std::string path;
};

namespace io_detail {

inline double parse_double(const std::string& token, const std::string& context) {
    double value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw std::runtime_error("invalid coordinate at " + context);
    return value;
}

struct PlyProperty {
    std::string type;
    std::string name;
};

inline int property_size(const std::string& type) {
    if (type == "char" || type == "int8" || type == "uchar" || type == "uint8") return 1;
    if (type == "short" || type == "int16" || type == "ushort" || type == "uint16") return 2;
    if (type == "int" || type == "int32" || type == "uint" || type == "uint32") return 4;
    if (type == "float" || type == "float32") return 4;
    if (type == "double" || type == "float64") return 8;
    return -1;
}

inline bool is_real(const std::string& type) {
    return type == "float" || type == "float32" || type == "double" || type == "float64";
}

struct PlyHeader {
    bool binary = false;
    long long vertex_count = 0;
    std::vector<PlyProperty> properties;
    int x = -1, y = -1, z = -1; // property positions
};

inline PlyHeader parse_ply_header(std::istream& in, const std::string& path) {
    auto fail = [&](const std::string& what) -> std::runtime_error {
        return std::runtime_error(what + " in " + path);
    };
    std::string line;
    if (!std::getline(in, line)) throw fail("corrupt header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "ply") throw fail("corrupt header");

    PlyHeader header;
    bool have_format = false, in_vertex = false, seen_element = false, done = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string keyword;
        ls >> keyword;
        if (keyword.empty() || keyword == "comment" || keyword == "obj_info") continue;
        if (keyword == "format") {
            std::string kind;
            ls >> kind;
            if (kind == "ascii")
                header.binary = false;
            else if (kind == "binary_little_endian")
                header.binary = true;
            else
                throw fail("unsupported layout");
            have_format = true;
        } else if (keyword == "element") {
            std::string name;
            long long count = -1;
            ls >> name >> count;
            if (!ls || count < 0) throw fail("corrupt header");
            if (!seen_element) {
                if (name != "vertex") throw fail("unsupported layout");
                header.vertex_count = count;
                in_vertex = true;
            } else {
                in_vertex = false; // trailing elements are ignored on read
            }
            seen_element = true;
        } else if (keyword == "property") {
            if (!in_vertex) continue;
            std::string type, name;
            ls >> type;
            if (type == "list") throw fail("unsupported layout");
            ls >> name;
            if (!ls) throw fail("corrupt header");
            if (property_size(type) < 0) throw fail("unsupported layout");
            int pos = static_cast<int>(header.properties.size());
            if (name == "x")
                header.x = pos;
            else if (name == "y")
                header.y = pos;
            else if (name == "z")
                header.z = pos;
            else
                std::cerr << "warning: ignoring vertex property '" << name << "' in "
                          << path << "\n";
            header.properties.push_back({type, name});
        } else if (keyword == "end_header") {
            done = true;
            break;
        } else {
            throw fail("corrupt header");
        }
    }
    if (!done || !have_format || !seen_element) throw fail("corrupt header");
    if (header.x < 0 || header.y < 0 || header.z < 0) throw fail("unsupported layout");
    for (int pos : {header.x, header.y, header.z})
        if (!is_real(header.properties[static_cast<std::size_t>(pos)].type))
            throw fail("unsupported layout");
    return header;
}

inline PointCloud read_ply(std::istream& in, const std::string& path) {
    PlyHeader header = parse_ply_header(in, path);
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(header.vertex_count));

    if (!header.binary) {
        std::string token;
        for (long long i = 0; i < header.vertex_count; ++i) {
            Vec3 p = Vec3::Zero();
            for (std::size_t prop = 0; prop < header.properties.size(); ++prop) {
                if (!(in >> token))
                    throw std::runtime_error("invalid coordinate at record " +
                                             std::to_string(i) + " in " + path);
                std::string context = "record " + std::to_string(i) + " in " + path;
                if (static_cast<int>(prop) == header.x)
                    p[0] = parse_double(token, context);
                else if (static_cast<int>(prop) == header.y)
                    p[1] = parse_double(token, context);
                else if (static_cast<int>(prop) == header.z)
                    p[2] = parse_double(token, context);
            }
            cloud.points.push_back(p);
        }
        return cloud;
    }

    std::size_t stride = 0;
    std::vector<std::size_t> offsets(header.properties.size());
    for (std::size_t prop = 0; prop < header.properties.size(); ++prop) {
        offsets[prop] = stride;
        stride += static_cast<std::size_t>(property_size(header.properties[prop].type));
    }
    std::vector<char> record(stride);
    auto read_value = [&](int pos) {
        const PlyProperty& prop = header.properties[static_cast<std::size_t>(pos)];
        const char* src = record.data() + offsets[static_cast<std::size_t>(pos)];
        if (prop.type == "float" || prop.type == "float32") {
            float f;
            std::memcpy(&f, src, sizeof(f));
            return static_cast<double>(f);
        }
        double d;
        std::memcpy(&d, src, sizeof(d));
        return d;
    };
    for (long long i = 0; i < header.vertex_count; ++i) {
        if (!in.read(record.data(), static_cast<std::streamsize>(stride)))
            throw std::runtime_error("truncated vertex data in " + path);
        Vec3 p(read_value(header.x), read_value(header.y), read_value(header.z));
        if (!p.allFinite())
            throw std::runtime_error("invalid coordinate at record " + std::to_string(i) +
                                     " in " + path);
        cloud.points.push_back(p);
    }
    return cloud;
}

inline PointCloud read_xyz(std::istream& in, const std::string& path) {
    PointCloud cloud;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string a, b, c;
        if (!(ls >> a)) continue; // blank line
        if (a[0] == '#') continue;
        if (!(ls >> b >> c))
            throw std::runtime_error("invalid coordinate at line " +
                                     std::to_string(line_no) + " in " + path);
        std::string context = "line " + std::to_string(line_no) + " in " + path;
        cloud.points.emplace_back(parse_double(a, context), parse_double(b, context),
                                  parse_double(c, context));
    }
    if (cloud.points.empty()) throw std::runtime_error("empty input: " + path);
    return cloud;
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace io_detail

/// Reads a cloud, detecting PLY against XYZ from the file itself. PLY needs
/// x, y, z vertex properties; other per-vertex properties are ignored with a
/// warning.
inline PointCloud read_cloud(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 3);
    in.clear();
    in.seekg(0);
    if (std::string(magic) == "ply" || io_detail::has_suffix(path, ".ply"))
        return io_detail::read_ply(in, path);
    return io_detail::read_xyz(in, path);
}

inline PointCloud read_cloud(const CloudFile& file) { return read_cloud(file.path); }

/// Writes a cloud. Binary PLY stores doubles and round-trips bit-exactly;
/// the text formats keep nine significant digits.
inline void write_cloud(const PointCloud& cloud, const CloudFile& file) {
    cloud.validate();
    std::ofstream out(file.path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + file.path);
    char buffer[128];

    switch (file.format) {
    case CloudFormat::PlyAscii:
    case CloudFormat::PlyBinaryLE: {
        bool binary = file.format == CloudFormat::PlyBinaryLE;
        out << "ply\n"
            << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n")
            << "element vertex " << cloud.size() << "\n"
            << "property double x\nproperty double y\nproperty double z\n"
            << "end_header\n";
        if (binary) {
            for (const Vec3& p : cloud.points) {
                double xyz[3] = {p[0], p[1], p[2]};
                out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
            }
        } else {
            for (const Vec3& p : cloud.points) {
                std::snprintf(buffer, sizeof(buffer), "%.9g %.9g %.9g\n", p[0], p[1], p[2]);
                out << buffer;
            }
        }
        break;
    }
    case CloudFormat::Xyz:
        for (const Vec3& p : cloud.points) {
            std::snprintf(buffer, sizeof(buffer), "%.9g %.9g %.9g\n", p[0], p[1], p[2]);
            out << buffer;
        }
        break;
    }
    if (!out) throw std::runtime_error("write failed: " + file.path);
}

} // namespace glr

#endif // GLR_IO_HPP
