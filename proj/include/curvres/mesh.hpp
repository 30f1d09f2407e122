#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <vector>

#include "curvres/curve.hpp"

namespace curvres {

struct MeshOptions {
    double epsilon = 0.1;         // layer half-width; 0 builds a limit-only mesh without a layer
    double box = 5.0;             // truncation box [-box, box]^2
    std::size_t n_s = 128;        // nodes along the curve at level 0
    std::size_t n_layer = 16;     // cells across [-eps, eps] at level 0 (even, >= 8)
    int level = 0;                // uniform refinement level; doubles every count
    double band = 0.5;            // tubular band reaches |r| = band * eps_star
    double grading = 1.25;        // geometric growth of radial steps in the band
    double exterior_growth = 0.1; // growth of the target spacing with distance from the band
};

/// Ring-structured triangulation of the box fitted to the curve and its
/// epsilon-layer.  Nodes on the curve come in (minus, plus) pairs sharing a
/// position: minus nodes belong to triangles on the inner side, plus nodes to
/// the outer side.  Continuous fields tie the pairs together.
struct InterfaceMesh {
    std::vector<Point> nodes;
    std::vector<std::array<double, 2>> tubular;  // (s, r); valid where in_tube
    std::vector<std::uint8_t> in_tube;
    std::vector<std::int8_t> node_side;          // -1 inside the curve, +1 outside
    std::vector<std::uint8_t> on_box;

    std::vector<std::array<int, 3>> triangles;   // counter-clockwise
    std::vector<std::int8_t> tri_side;
    std::vector<std::uint8_t> tri_layer;         // inside the epsilon-layer

    std::vector<int> curve_minus, curve_plus;    // ordered along s
    std::vector<double> curve_s;
    std::vector<std::array<int, 2>> interface_edges;  // consecutive minus nodes

    std::shared_ptr<const CurveFrame> frame;
    MeshOptions options;
    double epsilon = 0.0;
    std::size_t layer_s_cells = 0, layer_r_cells = 0;

    std::size_t size() const { return nodes.size(); }
    double triangle_area(std::size_t t) const;
    double area(int side) const;
    std::size_t layer_triangle_count() const;
    double min_triangle_area() const;

    /// Plain-text export: node, triangle, interface-edge and pair tables.
    void write(std::ostream& out) const;
};

/// Throws ConfigError if epsilon >= eps_star / 2 or the options are out of
/// range, GeometryError if a triangle comes out inverted.
InterfaceMesh build_mesh(const CurveFrame& frame, const MeshOptions& options);

}  // namespace curvres
