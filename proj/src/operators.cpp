#include "curvres/operators.hpp"

#include <algorithm>
#include <cmath>

#include "curvres/error.hpp"
#include "curvres/numerics.hpp"

namespace curvres {

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::VectorXd OperatorMatrices::expand(const Eigen::VectorXd& x) const
{
    if (x.size() != dofs()) throw ContractError("expand: vector size does not match the dof count");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(node_dof.size()));
    for (std::size_t i = 0; i < node_dof.size(); ++i)
        if (node_dof[i] >= 0) v[static_cast<Eigen::Index>(i)] = node_coef[i] * x[node_dof[i]];
    return v;
}

Eigen::VectorXd OperatorMatrices::restrict(const Eigen::VectorXd& v) const
{
    if (v.size() != static_cast<Eigen::Index>(node_dof.size()))
        throw ContractError("restrict: vector size does not match the node count");
    Eigen::VectorXd num = Eigen::VectorXd::Zero(dofs()), den = Eigen::VectorXd::Zero(dofs());
    for (std::size_t i = 0; i < node_dof.size(); ++i) {
        const int d = node_dof[i];
        if (d < 0) continue;
        num[d] += node_coef[i] * v[static_cast<Eigen::Index>(i)];
        den[d] += node_coef[i] * node_coef[i];
    }
    for (Eigen::Index d = 0; d < dofs(); ++d) num[d] = den[d] > 0.0 ? num[d] / den[d] : 0.0;
    return num;
}

namespace {

struct DofMap {
    std::vector<int> dof;
    std::vector<double> coef;
    int count = 0;
};

// Potential evaluated at a quadrature point of triangle t with barycentric
// coordinates l and physical position x.
using ElementPotential = std::function<double(std::size_t t, const std::array<double, 3>& l, const Point& x)>;

void assemble_into(const InterfaceMesh& mesh, const DofMap& map, const std::function<bool(std::size_t)>& use,
                   const ElementPotential& pot, const ElementPotential& layer_pot, Triplets& kt, Triplets& mt)
{
    const TriangleRule& rule = triangle_rule(6);
    const TriangleRule& fine = triangle_rule(10);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        if (!use(t)) continue;
        const auto& tri = mesh.triangles[t];
        const Point& a = mesh.nodes[tri[0]];
        const Point& b = mesh.nodes[tri[1]];
        const Point& c = mesh.nodes[tri[2]];
        const double area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        if (!(area2 > 0.0)) throw GeometryError("assembly met a degenerate triangle");
        // Gradients of the barycentric coordinates.
        const double g[3][2] = {{(b[1] - c[1]) / area2, (c[0] - b[0]) / area2},
                                {(c[1] - a[1]) / area2, (a[0] - c[0]) / area2},
                                {(a[1] - b[1]) / area2, (b[0] - a[0]) / area2}};
        double k[3][3], m[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                k[i][j] = 0.5 * area2 * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                m[i][j] = area2 * (i == j ? 2.0 : 1.0) / 24.0;
            }
        auto add_potential = [&](const TriangleRule& r, const ElementPotential& f) {
            for (std::size_t q = 0; q < r.weights.size(); ++q) {
                const auto& l = r.bary[q];
                const Point x{l[0] * a[0] + l[1] * b[0] + l[2] * c[0], l[0] * a[1] + l[1] * b[1] + l[2] * c[1]};
                const double v = f(t, l, x) * r.weights[q] * area2;
                if (v == 0.0) continue;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) k[i][j] += v * l[i] * l[j];
            }
        };
        if (pot) add_potential(rule, pot);
        if (layer_pot && mesh.tri_layer[t]) add_potential(fine, layer_pot);
        for (int i = 0; i < 3; ++i) {
            const int di = map.dof[tri[i]];
            if (di < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int dj = map.dof[tri[j]];
                if (dj < 0) continue;
                const double cc = map.coef[tri[i]] * map.coef[tri[j]];
                kt.emplace_back(di, dj, cc * k[i][j]);
                mt.emplace_back(di, dj, cc * m[i][j]);
            }
        }
    }
}

OperatorMatrices finish(const DofMap& map, Triplets& kt, Triplets& mt, std::string tag)
{
    OperatorMatrices op;
    op.K.resize(map.count, map.count);
    op.M.resize(map.count, map.count);
    op.K.setFromTriplets(kt.begin(), kt.end());
    op.M.setFromTriplets(mt.begin(), mt.end());
    // Symmetrize away summation-order round-off.
    SparseMatrix kt_ = op.K.transpose();
    op.K = 0.5 * (op.K + kt_);
    SparseMatrix mt_ = op.M.transpose();
    op.M = 0.5 * (op.M + mt_);
    op.K.makeCompressed();
    op.M.makeCompressed();
    op.node_dof = map.dof;
    op.node_coef = map.coef;
    op.tag = std::move(tag);
    return op;
}

ElementPotential w_potential(const PlaneFunction& W)
{
    return [W](std::size_t, const std::array<double, 3>&, const Point& x) { return W(x[0], x[1]); };
}

// Continuous field over the whole box: curve pairs tied with `theta`.
DofMap tied_map(const InterfaceMesh& mesh, double theta, bool swap_sides)
{
    DofMap map;
    map.dof.assign(mesh.size(), -1);
    map.coef.assign(mesh.size(), 1.0);
    std::vector<std::uint8_t> eliminated(mesh.size(), 0);
    const std::vector<int>& keep = swap_sides ? mesh.curve_plus : mesh.curve_minus;
    const std::vector<int>& drop = swap_sides ? mesh.curve_minus : mesh.curve_plus;
    for (int i : drop) eliminated[i] = 1;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        if (mesh.on_box[i] || eliminated[i]) continue;
        map.dof[i] = map.count++;
    }
    for (std::size_t j = 0; j < drop.size(); ++j) {
        map.dof[drop[j]] = map.dof[keep[j]];
        map.coef[drop[j]] = theta;
    }
    return map;
}

}  // namespace

OperatorMatrices assemble_heps(const InterfaceMesh& mesh, const PlaneFunction& W, const PotentialProfile& profile)
{
    if (!(mesh.epsilon > 0.0)) throw ContractError("assemble_heps needs a mesh with an epsilon-layer");
    const double eps = mesh.epsilon;
    const double length = mesh.frame->length();
    const DofMap map = tied_map(mesh, 1.0, false);
    ElementPotential layer = [&](std::size_t t, const std::array<double, 3>& l, const Point&) {
        const auto& tri = mesh.triangles[t];
        double s = 0.0, r = 0.0;
        const double s0 = mesh.tubular[tri[0]][0];
        for (int i = 0; i < 3; ++i) {
            if (!mesh.in_tube[tri[i]]) throw GeometryError("layer triangle with a vertex outside the tube");
            double si = mesh.tubular[tri[i]][0];
            if (si - s0 > 0.5 * length) si -= length;
            if (s0 - si > 0.5 * length) si += length;
            s += l[i] * si;
            r += l[i] * mesh.tubular[tri[i]][1];
        }
        const double n = std::clamp(r / eps, -1.0, 1.0);
        double v = profile.V(n) / (eps * eps);
        if (!profile.u_is_zero()) v += profile.U(wrap_periodic(s, length), n) / eps;
        return v;
    };
    Triplets kt, mt;
    assemble_into(mesh, map, [](std::size_t) { return true; }, w_potential(W), layer, kt, mt);
    return finish(map, kt, mt, "heps");
}

OperatorMatrices assemble_limit(const InterfaceMesh& mesh, const PlaneFunction& W, const TransmissionData& trans,
                                Orientation orientation)
{
    if (!trans.resonant) throw ContractError("assemble_limit needs resonant transmission data");
    if (trans.theta == 0.0 || !std::isfinite(trans.theta))
        throw UnsupportedModelError("transmission coefficient theta must be finite and non-zero");
    const bool flip = orientation == Orientation::flipped;
    const DofMap map = tied_map(mesh, trans.theta, flip);
    Triplets kt, mt;
    assemble_into(mesh, map, [](std::size_t) { return true; }, w_potential(W), nullptr, kt, mt);

    // int_gamma Upsilon u- psi- over the interface edges of the minus side.
    const std::vector<int>& minus = flip ? mesh.curve_plus : mesh.curve_minus;
    const double length = mesh.frame->length();
    const std::size_t nc = minus.size();
    const QuadratureRule1D& g = gauss_legendre(6);
    for (std::size_t j = 0; j < nc; ++j) {
        const int a = minus[j], b = minus[(j + 1) % nc];
        const double sa = mesh.curve_s[j];
        const double sb = j + 1 < nc ? mesh.curve_s[j + 1] : length;
        const Point& xa = mesh.nodes[a];
        const Point& xb = mesh.nodes[b];
        const double h = std::hypot(xb[0] - xa[0], xb[1] - xa[1]);
        double e[2][2] = {{0, 0}, {0, 0}};
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double u = 0.5 * (1.0 + g.nodes[q]);
            const double s = sa + u * (sb - sa);
            const double ups = trans.upsilon_at(flip ? wrap_periodic(length - s, length) : s);
            const double w = 0.5 * g.weights[q] * h * ups;
            const double phi[2] = {1.0 - u, u};
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 2; ++k) e[i][k] += w * phi[i] * phi[k];
        }
        const int d[2] = {map.dof[a], map.dof[b]};
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                if (d[i] >= 0 && d[k] >= 0) kt.emplace_back(d[i], d[k], e[i][k]);
    }
    return finish(map, kt, mt, flip ? "limit-flipped" : "limit");
}

std::pair<OperatorMatrices, OperatorMatrices> assemble_dirichlet_split(const InterfaceMesh& mesh,
                                                                       const PlaneFunction& W)
{
    std::vector<std::uint8_t> on_curve(mesh.size(), 0);
    for (int i : mesh.curve_minus) on_curve[i] = 1;
    for (int i : mesh.curve_plus) on_curve[i] = 1;
    auto build = [&](int side, const char* tag) {
        DofMap map;
        map.dof.assign(mesh.size(), -1);
        map.coef.assign(mesh.size(), 1.0);
        for (std::size_t i = 0; i < mesh.size(); ++i)
            if (mesh.node_side[i] == side && !on_curve[i] && !mesh.on_box[i]) map.dof[i] = map.count++;
        Triplets kt, mt;
        assemble_into(mesh, map, [&](std::size_t t) { return mesh.tri_side[t] == side; }, w_potential(W), nullptr,
                      kt, mt);
        return finish(map, kt, mt, tag);
    };
    return {build(-1, "dirichlet-inner"), build(1, "dirichlet-outer")};
}

SparseMatrix node_mass_matrix(const InterfaceMesh& mesh)
{
    DofMap map;
    map.count = static_cast<int>(mesh.size());
    map.dof.resize(mesh.size());
    map.coef.assign(mesh.size(), 1.0);
    for (std::size_t i = 0; i < mesh.size(); ++i) map.dof[i] = static_cast<int>(i);
    Triplets kt, mt;
    assemble_into(mesh, map, [](std::size_t) { return true; }, nullptr, nullptr, kt, mt);
    return finish(map, kt, mt, "mass").M;
}

void write_triplets(std::ostream& out, const SparseMatrix& A)
{
    out.precision(17);
    out << "# " << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

double asymmetry(const SparseMatrix& A)
{
    const SparseMatrix d = A - SparseMatrix(A.transpose());
    double dmax = 0.0, amax = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(d, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
    return amax > 0.0 ? dmax / amax : 0.0;
}

}  // namespace curvres
