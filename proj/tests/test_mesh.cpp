#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "curvres/error.hpp"
#include "curvres/mesh.hpp"

using namespace curvres;
using std::numbers::pi;

namespace {
const CurveFrame& circle()
{
    static const CurveFrame f = reparametrize_arclength(ClosedCurve::circle(1.0), 256);
    return f;
}
}  // namespace

TEST(Mesh, CircleLayerAndInterface)
{
    MeshOptions o;
    o.epsilon = 0.1;
    o.box = 4.0;
    o.n_s = 64;
    o.n_layer = 8;
    const auto m = build_mesh(circle(), o);
    EXPECT_EQ(m.layer_s_cells, 64u);
    EXPECT_EQ(m.layer_r_cells, 8u);
    EXPECT_EQ(m.layer_triangle_count(), 2u * 64u * 8u);
    ASSERT_EQ(m.curve_minus.size(), 64u);
    for (std::size_t j = 0; j < m.curve_minus.size(); ++j) {
        const auto& p = m.nodes[m.curve_minus[j]];
        const auto& q = m.nodes[m.curve_plus[j]];
        EXPECT_NEAR(std::hypot(p[0], p[1]), 1.0, 1e-10);
        EXPECT_EQ(p, q);
    }
    EXPECT_GT(m.min_triangle_area(), 0.0);
    EXPECT_NEAR(m.area(-1), pi, 0.01 * pi);
    EXPECT_NEAR(m.area(-1) + m.area(1), 64.0, 0.5);  // box corners are cut by the last ring
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m.on_box[i]) continue;
        EXPECT_NEAR(std::max(std::abs(m.nodes[i][0]), std::abs(m.nodes[i][1])), 4.0, 1e-12);
    }
}

TEST(Mesh, LayerTrianglesHaveTubularVertices)
{
    MeshOptions o;
    o.epsilon = 0.05;
    o.n_s = 32;
    const auto m = build_mesh(circle(), o);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        if (!m.tri_layer[t]) continue;
        for (int v : m.triangles[t]) {
            ASSERT_TRUE(m.in_tube[v]);
            EXPECT_LE(std::abs(m.tubular[v][1]), 0.05 + 1e-14);
        }
    }
}

TEST(Mesh, RefinementQuadruplesTriangles)
{
    MeshOptions o;
    o.epsilon = 0.1;
    o.n_s = 32;
    const auto a = build_mesh(circle(), o);
    o.level = 1;
    const auto b = build_mesh(circle(), o);
    const double ratio = double(b.triangles.size()) / double(a.triangles.size());
    EXPECT_GT(ratio, 3.5);
    EXPECT_LT(ratio, 4.5);
    EXPECT_EQ(b.layer_triangle_count(), 4 * a.layer_triangle_count());
    EXPECT_GT(b.min_triangle_area(), 0.0);
}

TEST(Mesh, EllipseEpsilonBound)
{
    const auto e = reparametrize_arclength(ClosedCurve::ellipse(2.0, 1.0), 256);
    MeshOptions o;
    o.epsilon = 0.2;
    o.box = 5.0;
    const auto m = build_mesh(e, o);
    EXPECT_GT(m.min_triangle_area(), 0.0);
    EXPECT_NEAR(m.area(-1), 2 * pi, 0.01 * 2 * pi);
    o.epsilon = 0.3;
    EXPECT_THROW(build_mesh(e, o), ConfigError);
}

TEST(Mesh, LimitOnlyMesh)
{
    MeshOptions o;
    o.epsilon = 0.0;
    o.n_s = 64;
    const auto m = build_mesh(circle(), o);
    EXPECT_EQ(m.layer_triangle_count(), 0u);
    EXPECT_EQ(m.curve_plus.size(), 64u);
    EXPECT_NEAR(m.area(-1), pi, 0.01 * pi);
}

TEST(Mesh, RejectsBadOptions)
{
    MeshOptions o;
    o.n_layer = 6;
    EXPECT_THROW(build_mesh(circle(), o), ConfigError);
    o = {};
    o.box = 1.2;
    EXPECT_THROW(build_mesh(circle(), o), ConfigError);
    EXPECT_THROW(build_mesh(circle().flipped(), MeshOptions{}), ContractError);
}

TEST(Mesh, TextExport)
{
    MeshOptions o;
    o.n_s = 16;
    o.n_layer = 8;
    std::ostringstream os;
    build_mesh(circle(), o).write(os);
    EXPECT_NE(os.str().find("# triangles"), std::string::npos);
    EXPECT_NE(os.str().find("# interface_pairs 16"), std::string::npos);
}
