#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "canopar/geometry.hpp"

namespace canopar {

// PLY triangle-mesh I/O: ASCII and binary little-endian, vertex x/y/z as
// float or double, faces as index lists (quads and larger polygons are
// fan-triangulated). An integer "organ" property on faces or vertices maps
// onto Triangle::organ (0 = leaf, 1 = stem, 2 = ground); the default is leaf.

namespace ply_detail {

struct Property {
    std::string name;
    std::string type;
    bool is_list = false;
    std::string count_type;
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> properties;
};

inline std::size_t scalar_size(const std::string& t) {
    if (t == "char" || t == "int8" || t == "uchar" || t == "uint8") return 1;
    if (t == "short" || t == "int16" || t == "ushort" || t == "uint16") return 2;
    if (t == "int" || t == "int32" || t == "uint" || t == "uint32" || t == "float" || t == "float32") return 4;
    if (t == "double" || t == "float64") return 8;
    throw Error("ply: unknown property type '" + t + "'");
}

inline double read_binary_scalar(std::istream& in, const std::string& t) {
    unsigned char buf[8];
    std::size_t n = scalar_size(t);
    in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
    if (!in) throw Error("ply: unexpected end of binary data");
    auto as = [&](auto v) {
        std::memcpy(&v, buf, sizeof(v));
        return static_cast<double>(v);
    };
    if (t == "char" || t == "int8") return as(std::int8_t{});
    if (t == "uchar" || t == "uint8") return as(std::uint8_t{});
    if (t == "short" || t == "int16") return as(std::int16_t{});
    if (t == "ushort" || t == "uint16") return as(std::uint16_t{});
    if (t == "int" || t == "int32") return as(std::int32_t{});
    if (t == "uint" || t == "uint32") return as(std::uint32_t{});
    if (t == "float" || t == "float32") return as(float{});
    return as(double{});
}

inline double read_ascii_scalar(std::istream& in) {
    double v;
    if (!(in >> v)) throw Error("ply: unexpected end of ascii data");
    return v;
}

inline Organ organ_from_code(int code) {
    switch (code) {
        case 1: return Organ::Stem;
        case 2: return Organ::Ground;
        default: return Organ::Leaf;
    }
}

}  // namespace ply_detail

// Load a PLY mesh; vertex coordinates are multiplied by `scale` (unit
// conversion to meters). Throws Error on malformed input or an empty mesh.
inline Mesh load_ply(const std::string& path, double scale = 1.0) {
    using namespace ply_detail;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("ply: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw Error("ply: empty file");
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != "ply") throw Error("ply: missing 'ply' magic in '" + path + "'");

    bool binary = false;
    std::vector<Element> elements;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.size() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii") binary = false;
            else if (fmt == "binary_little_endian") binary = true;
            else throw Error("ply: unsupported format '" + fmt + "'");
        } else if (tok == "element") {
            Element e;
            ls >> e.name >> e.count;
            if (!ls) throw Error("ply: malformed element line");
            elements.push_back(e);
        } else if (tok == "property") {
            if (elements.empty()) throw Error("ply: property before element");
            Property p;
            std::string t;
            ls >> t;
            if (t == "list") {
                p.is_list = true;
                ls >> p.count_type >> p.type >> p.name;
            } else {
                p.type = t;
                ls >> p.name;
            }
            if (!ls) throw Error("ply: malformed property line");
            elements.back().properties.push_back(p);
        } else if (tok == "end_header") {
            header_done = true;
            break;
        } else {
            throw Error("ply: unexpected header token '" + tok + "'");
        }
    }
    if (!header_done) throw Error("ply: missing end_header");

    std::vector<Vec3> vertices;
    std::vector<int> vertex_organ;
    Mesh mesh;

    for (const Element& elem : elements) {
        const bool is_vertex = elem.name == "vertex";
        const bool is_face = elem.name == "face";
        for (std::size_t row = 0; row < elem.count; ++row) {
            Vec3 v;
            int organ_code = -1;
            std::vector<std::size_t> indices;
            for (const Property& p : elem.properties) {
                if (p.is_list) {
                    double cnt = binary ? read_binary_scalar(in, p.count_type) : read_ascii_scalar(in);
                    auto n = static_cast<std::size_t>(cnt);
                    for (std::size_t k = 0; k < n; ++k) {
                        double item = binary ? read_binary_scalar(in, p.type) : read_ascii_scalar(in);
                        if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index"))
                            indices.push_back(static_cast<std::size_t>(item));
                    }
                } else {
                    double item = binary ? read_binary_scalar(in, p.type) : read_ascii_scalar(in);
                    if (is_vertex) {
                        if (p.name == "x") v.x = item;
                        else if (p.name == "y") v.y = item;
                        else if (p.name == "z") v.z = item;
                        else if (p.name == "organ") organ_code = static_cast<int>(item);
                    } else if (is_face && p.name == "organ") {
                        organ_code = static_cast<int>(item);
                    }
                }
            }
            if (is_vertex) {
                vertices.push_back(v * scale);
                vertex_organ.push_back(organ_code);
            } else if (is_face) {
                if (indices.size() < 3) throw Error("ply: face with fewer than 3 vertices");
                for (std::size_t idx : indices)
                    if (idx >= vertices.size()) throw Error("ply: face index out of range");
                Organ organ = Organ::Leaf;
                if (organ_code >= 0) organ = organ_from_code(organ_code);
                else if (vertex_organ[indices[0]] >= 0) organ = organ_from_code(vertex_organ[indices[0]]);
                for (std::size_t k = 1; k + 1 < indices.size(); ++k) {
                    Triangle t;
                    t.v0 = vertices[indices[0]];
                    t.v1 = vertices[indices[k]];
                    t.v2 = vertices[indices[k + 1]];
                    t.organ = organ;
                    if (triangle_area(t) > kDegeneracyAreaEps) mesh.triangles.push_back(t);
                }
            }
        }
    }

    if (mesh.empty()) throw Error("ply: no triangles in '" + path + "'");
    mesh.renumber();
    return mesh;
}

// Write the mesh as a triangle soup (three vertices per face) with the organ
// stored as a face property. Output coordinates are divided by `scale`.
inline void save_ply(const Mesh& mesh, const std::string& path, bool binary = false,
                     double scale = 1.0) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("ply: cannot write '" + path + "'");
    const std::size_t nv = mesh.size() * 3;
    out << "ply\n";
    out << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n");
    out << "element vertex " << nv << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "element face " << mesh.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "property uchar organ\n";
    out << "end_header\n";

    auto write_vertex = [&](const Vec3& v) {
        if (binary) {
            float c[3] = {static_cast<float>(v.x / scale), static_cast<float>(v.y / scale),
                          static_cast<float>(v.z / scale)};
            out.write(reinterpret_cast<const char*>(c), sizeof(c));
        } else {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", v.x / scale, v.y / scale, v.z / scale);
            out << buf;
        }
    };
    for (const auto& t : mesh.triangles) {
        write_vertex(t.v0);
        write_vertex(t.v1);
        write_vertex(t.v2);
    }
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const auto organ_code = static_cast<std::uint8_t>(mesh.triangles[i].organ);
        if (binary) {
            std::uint8_t n = 3;
            std::int32_t idx[3] = {static_cast<std::int32_t>(3 * i),
                                   static_cast<std::int32_t>(3 * i + 1),
                                   static_cast<std::int32_t>(3 * i + 2)};
            out.write(reinterpret_cast<const char*>(&n), 1);
            out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
            out.write(reinterpret_cast<const char*>(&organ_code), 1);
        } else {
            out << "3 " << 3 * i << " " << 3 * i + 1 << " " << 3 * i + 2 << " "
                << static_cast<int>(organ_code) << "\n";
        }
    }
    if (!out) throw Error("ply: write failed for '" + path + "'");
}

}  // namespace canopar
