#include "curvres/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curvres/error.hpp"

namespace curvres {

namespace {

double cross3(const Point& a, const Point& b, const Point& c)
{
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// Radial steps from the layer edge out to the band edge: geometric growth
// from `first` capped at `cap`, rescaled to cover `total` exactly.
std::vector<double> graded_steps(double first, double cap, double growth, double total)
{
    std::vector<double> steps;
    if (total <= 0.0) return steps;
    double sum = 0.0, step = std::min(first, total);
    while (sum + 0.5 * step < total) {
        steps.push_back(step);
        sum += step;
        step = std::min(step * growth, cap);
    }
    if (steps.empty()) steps.push_back(total), sum = total;
    for (double& s : steps) s *= total / sum;
    return steps;
}

struct RingSpec {
    double param;
    std::size_t count;
};

// Inserts `mult - 1` sub-rings between consecutive level-0 rings; sub-rings
// keep the count of the ring they start from.
std::vector<RingSpec> refine(const std::vector<RingSpec>& rings, std::size_t mult)
{
    std::vector<RingSpec> out;
    for (std::size_t k = 0; k < rings.size(); ++k) {
        if (k > 0) {
            for (std::size_t q = 1; q < mult; ++q) {
                const double p = rings[k - 1].param +
                                 (rings[k].param - rings[k - 1].param) * static_cast<double>(q) / static_cast<double>(mult);
                out.push_back({p, rings[k - 1].count * mult});
            }
        }
        out.push_back({rings[k].param, rings[k].count * mult});
    }
    return out;
}

class Builder {
public:
    Builder(const CurveFrame& f, const MeshOptions& o) : f_(f), o_(o) {}

    InterfaceMesh run();

private:
    int add_node(const Point& x, std::int8_t side, bool tube = false, double s = 0.0, double r = 0.0, bool box = false)
    {
        m_.nodes.push_back(x);
        m_.tubular.push_back({s, r});
        m_.in_tube.push_back(tube ? 1 : 0);
        m_.node_side.push_back(side);
        m_.on_box.push_back(box ? 1 : 0);
        return static_cast<int>(m_.nodes.size() - 1);
    }

    double s_of(std::size_t j, std::size_t count) const
    {
        return f_.length() * static_cast<double>(j) / static_cast<double>(count);
    }

    std::vector<int> tubular_ring(double r, std::size_t count, std::int8_t side)
    {
        std::vector<int> ring(count);
        for (std::size_t j = 0; j < count; ++j) {
            const double s = s_of(j, count);
            ring[j] = add_node(f_.tubular_to_cartesian(s, r), side, true, s, r);
        }
        return ring;
    }

    Point box_point(const Point& p) const
    {
        const double dx = p[0] - centre_[0], dy = p[1] - centre_[1];
        const double len = std::hypot(dx, dy);
        const double ux = dx / len, uy = dy / len;
        double t = std::numeric_limits<double>::infinity();
        if (ux != 0.0) t = std::min(t, ((ux > 0 ? o_.box : -o_.box) - centre_[0]) / ux);
        if (uy != 0.0) t = std::min(t, ((uy > 0 ? o_.box : -o_.box) - centre_[1]) / uy);
        return {centre_[0] + t * ux, centre_[1] + t * uy};
    }

    void add_triangle(int a, int b, int c, std::int8_t side, bool layer)
    {
        const double area = 0.5 * cross3(m_.nodes[a], m_.nodes[b], m_.nodes[c]) * orient_;
        if (!(area > 0.0))
            throw GeometryError("mesh generation produced an inverted triangle near (" +
                                std::to_string(m_.nodes[a][0]) + ", " + std::to_string(m_.nodes[a][1]) +
                                "); the curve may not be star-shaped about its centroid");
        if (orient_ > 0)
            m_.triangles.push_back({a, b, c});
        else
            m_.triangles.push_back({a, c, b});
        m_.tri_side.push_back(side);
        m_.tri_layer.push_back(layer ? 1 : 0);
    }

    // Zips two closed rings (inner a, outer b) whose node j sits at
    // parameter j / count.
    void stitch(const std::vector<int>& a, const std::vector<int>& b, std::int8_t side, bool layer)
    {
        const std::size_t ca = a.size(), cb = b.size();
        std::size_t i = 0, j = 0;
        while (i < ca || j < cb) {
            const bool advance_a = j == cb || (i < ca && (i + 1) * cb <= (j + 1) * ca);
            if (advance_a) {
                add_triangle(a[i], a[(i + 1) % ca], b[j % cb], side, layer);
                ++i;
            } else {
                add_triangle(a[i % ca], b[(j + 1) % cb], b[j], side, layer);
                ++j;
            }
        }
    }

    const CurveFrame& f_;
    MeshOptions o_;
    InterfaceMesh m_;
    Point centre_{0.0, 0.0};
    double orient_ = 1.0;
};

InterfaceMesh Builder::run()
{
    const double eps = o_.epsilon;
    const double length = f_.length();
    const std::size_t mult = std::size_t{1} << o_.level;
    const std::size_t ns = o_.n_s;
    const double h0 = length / static_cast<double>(ns);
    const double b = o_.band * f_.eps_star();
    if (b <= eps) throw ConfigError("tubular band does not extend past the layer");

    m_.frame = std::make_shared<const CurveFrame>(f_);
    m_.options = o_;
    m_.epsilon = eps;
    orient_ = f_.signed_area() < 0.0 ? 1.0 : -1.0;

    // Area centroid of the curve polygon.
    {
        const auto& p = f_.points();
        double a = 0.0, cx = 0.0, cy = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            const Point& u = p[j];
            const Point& v = p[(j + 1) % p.size()];
            const double w = u[0] * v[1] - v[0] * u[1];
            a += w;
            cx += (u[0] + v[0]) * w;
            cy += (u[1] + v[1]) * w;
        }
        centre_ = {cx / (3.0 * a), cy / (3.0 * a)};
    }

    // Level-0 tubular r values, inside to outside.
    const double first = eps > 0.0 ? 2.0 * eps / static_cast<double>(o_.n_layer) : 0.5 * h0;
    const std::vector<double> band = graded_steps(first, h0, o_.grading, b - eps);
    std::vector<double> rs;
    {
        double r = -b;
        rs.push_back(r);
        for (auto it = band.rbegin(); it != band.rend(); ++it) rs.push_back(r += *it);
        rs.back() = -eps;
        if (eps > 0.0)
            for (std::size_t i = 1; i <= o_.n_layer; ++i)
                rs.push_back(-eps + 2.0 * eps * static_cast<double>(i) / static_cast<double>(o_.n_layer));
        rs.back() = eps;
        r = eps;
        for (double st : band) rs.push_back(r += st);
        rs.back() = b;
    }
    std::vector<double> rfine;
    for (std::size_t k = 0; k + 1 < rs.size(); ++k)
        for (std::size_t q = 0; q < mult; ++q)
            rfine.push_back(rs[k] + (rs[k + 1] - rs[k]) * static_cast<double>(q) / static_cast<double>(mult));
    rfine.push_back(rs.back());
    for (double& r : rfine)
        if (std::abs(r) < 1e-15 * b) r = 0.0;

    // Interior rings: the inner band edge scaled towards the centroid.
    auto inner_base = [&](double s) { return f_.tubular_to_cartesian(s, -b); };
    double per_in = 0.0, rad_in = 0.0;
    for (std::size_t j = 0; j < ns; ++j) {
        const Point p = inner_base(s_of(j, ns)), q = inner_base(s_of(j + 1, ns));
        per_in += std::hypot(q[0] - p[0], q[1] - p[1]);
        rad_in += std::hypot(p[0] - centre_[0], p[1] - centre_[1]) / static_cast<double>(ns);
    }
    std::vector<RingSpec> inner{{1.0, ns}};
    while (true) {
        const double t = inner.back().param;
        std::size_t c = inner.back().count;
        const double dt = t * per_in / static_cast<double>(c) / rad_in;
        const double tn = t - dt;
        if (tn <= 0.35 * dt) break;
        if (c % 2 == 0 && c / 2 >= 8 && tn * per_in / static_cast<double>(c / 2) <= 1.41 * h0) c /= 2;
        inner.push_back({tn, c});
        // Once the count cannot drop further, stop when the next step would
        // cover half the remaining distance; the fan closes the gap.
        const bool final_count = c % 2 != 0 || c / 2 < 8;
        if (final_count && per_in / (static_cast<double>(c) * rad_in) >= 0.5) break;
        if (tn < 1e-3) break;
    }
    std::reverse(inner.begin(), inner.end());  // centre outwards
    const std::vector<RingSpec> inner_f = refine(inner, mult);

    // Exterior rings: outer band edge blended along rays to the box.
    auto outer_base = [&](double s) { return f_.tubular_to_cartesian(s, b); };
    for (std::size_t j = 0; j < ns; ++j) {
        const Point p = outer_base(s_of(j, ns));
        if (std::max(std::abs(p[0]), std::abs(p[1])) >= 0.95 * o_.box)
            throw ConfigError("truncation box is too small for the curve and its tubular band");
    }
    auto exterior_point = [&](double s, double tau) {
        const Point p = outer_base(s);
        const Point q = box_point(p);
        return Point{p[0] + tau * (q[0] - p[0]), p[1] + tau * (q[1] - p[1])};
    };
    double reach = 0.0;
    for (std::size_t j = 0; j < ns; ++j) {
        const Point p = outer_base(s_of(j, ns)), q = box_point(p);
        reach += std::hypot(q[0] - p[0], q[1] - p[1]) / static_cast<double>(ns);
    }
    auto ring_perimeter = [&](double tau, std::size_t c) {
        double per = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            const Point p = exterior_point(s_of(j, c), tau), q = exterior_point(s_of(j + 1, c), tau);
            per += std::hypot(q[0] - p[0], q[1] - p[1]);
        }
        return per;
    };
    const double h_ref = ring_perimeter(0.0, ns) / static_cast<double>(ns);
    std::vector<RingSpec> outer{{0.0, ns}};
    while (outer.back().param < 1.0) {
        const double tau = outer.back().param;
        std::size_t c = outer.back().count;
        const double allowed = h_ref + o_.exterior_growth * tau * reach;
        const double per = ring_perimeter(tau, c);
        if (per / static_cast<double>(c) > 1.41 * allowed) c *= 2;
        const double dtau = per / static_cast<double>(c) / reach;
        double tn = tau + dtau;
        if (tn > 1.0 - 0.5 * dtau) tn = 1.0;
        outer.push_back({tn, c});
    }
    const std::vector<RingSpec> outer_f = refine(outer, mult);

    // Assemble rings from the centre outwards.
    const int centre = add_node(centre_, -1);
    std::vector<int> prev;
    {
        // Sub-rings of the central fan at level > 0: count grows linearly.
        const RingSpec first_ring = inner_f.front();
        const std::size_t c0 = first_ring.count / mult;
        for (std::size_t q = 1; q < mult; ++q) {
            const double t = first_ring.param * static_cast<double>(q) / static_cast<double>(mult);
            const std::size_t c = c0 * q;
            std::vector<int> ring(c);
            for (std::size_t j = 0; j < c; ++j) {
                const Point p = inner_base(s_of(j, c));
                ring[j] = add_node({centre_[0] + t * (p[0] - centre_[0]), centre_[1] + t * (p[1] - centre_[1])}, -1);
            }
            if (prev.empty()) {
                for (std::size_t j = 0; j < c; ++j) add_triangle(centre, ring[(j + 1) % c], ring[j], -1, false);
            } else {
                stitch(prev, ring, -1, false);
            }
            prev = std::move(ring);
        }
    }
    for (std::size_t k = 0; k + 1 < inner_f.size(); ++k) {  // last interior ring is the band edge
        const auto [t, c] = inner_f[k];
        std::vector<int> ring(c);
        for (std::size_t j = 0; j < c; ++j) {
            const Point p = inner_base(s_of(j, c));
            ring[j] = add_node({centre_[0] + t * (p[0] - centre_[0]), centre_[1] + t * (p[1] - centre_[1])}, -1);
        }
        if (prev.empty()) {
            for (std::size_t j = 0; j < c; ++j) add_triangle(centre, ring[(j + 1) % c], ring[j], -1, false);
        } else {
            stitch(prev, ring, -1, false);
        }
        prev = std::move(ring);
    }

    const std::size_t nc = ns * mult;
    const double layer_lo = -eps, layer_hi = eps;
    bool past_curve = false;
    for (std::size_t k = 0; k < rfine.size(); ++k) {
        const double r = rfine[k];
        const std::int8_t side = (r < 0.0 || (r == 0.0 && !past_curve)) ? -1 : 1;
        std::vector<int> ring = tubular_ring(r, nc, side);
        if (!prev.empty()) {
            const double rmid = k > 0 ? 0.5 * (r + rfine[k - 1]) : r;
            const bool layer = eps > 0.0 && k > 0 && rmid > layer_lo && rmid < layer_hi;
            const std::int8_t tside = (k > 0 && rmid > 0.0) ? 1 : -1;
            stitch(prev, ring, tside, layer);
        }
        if (r == 0.0) {
            m_.curve_minus = ring;
            m_.curve_plus = tubular_ring(0.0, nc, 1);
            ring = m_.curve_plus;
            past_curve = true;
        }
        prev = std::move(ring);
    }
    for (std::size_t k = 1; k < outer_f.size(); ++k) {
        const auto [tau, c] = outer_f[k];
        std::vector<int> ring(c);
        for (std::size_t j = 0; j < c; ++j)
            ring[j] = add_node(exterior_point(s_of(j, c), tau), 1, false, 0.0, 0.0, tau >= 1.0);
        stitch(prev, ring, 1, false);
        prev = std::move(ring);
    }

    for (std::size_t j = 0; j < nc; ++j) {
        m_.curve_s.push_back(s_of(j, nc));
        m_.interface_edges.push_back({m_.curve_minus[j], m_.curve_minus[(j + 1) % nc]});
    }
    m_.layer_s_cells = eps > 0.0 ? nc : 0;
    m_.layer_r_cells = eps > 0.0 ? o_.n_layer * mult : 0;
    return std::move(m_);
}

}  // namespace

double InterfaceMesh::triangle_area(std::size_t t) const
{
    const auto& tr = triangles[t];
    return 0.5 * cross3(nodes[tr[0]], nodes[tr[1]], nodes[tr[2]]);
}

double InterfaceMesh::area(int side) const
{
    double a = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t)
        if (tri_side[t] == side) a += triangle_area(t);
    return a;
}

std::size_t InterfaceMesh::layer_triangle_count() const
{
    return static_cast<std::size_t>(std::count(tri_layer.begin(), tri_layer.end(), 1));
}

double InterfaceMesh::min_triangle_area() const
{
    double a = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < triangles.size(); ++t) a = std::min(a, triangle_area(t));
    return a;
}

void InterfaceMesh::write(std::ostream& out) const
{
    out.precision(17);
    out << "# nodes " << nodes.size() << "\n# id x1 x2 side on_box in_tube s r\n";
    for (std::size_t i = 0; i < nodes.size(); ++i)
        out << i << ' ' << nodes[i][0] << ' ' << nodes[i][1] << ' ' << int(node_side[i]) << ' ' << int(on_box[i])
            << ' ' << int(in_tube[i]) << ' ' << tubular[i][0] << ' ' << tubular[i][1] << '\n';
    out << "# triangles " << triangles.size() << "\n# id a b c side layer\n";
    for (std::size_t t = 0; t < triangles.size(); ++t)
        out << t << ' ' << triangles[t][0] << ' ' << triangles[t][1] << ' ' << triangles[t][2] << ' '
            << int(tri_side[t]) << ' ' << int(tri_layer[t]) << '\n';
    out << "# interface_edges " << interface_edges.size() << "\n# a b\n";
    for (const auto& e : interface_edges) out << e[0] << ' ' << e[1] << '\n';
    out << "# interface_pairs " << curve_minus.size() << "\n# minus plus s\n";
    for (std::size_t j = 0; j < curve_minus.size(); ++j)
        out << curve_minus[j] << ' ' << curve_plus[j] << ' ' << curve_s[j] << '\n';
}

InterfaceMesh build_mesh(const CurveFrame& frame, const MeshOptions& o)
{
    if (!frame.outward()) throw ContractError("build_mesh expects the outward-oriented frame");
    if (!(o.epsilon >= 0.0) || o.epsilon >= 0.5 * frame.eps_star())
        throw ConfigError("epsilon = " + std::to_string(o.epsilon) + " must lie in [0, eps*/2) = [0, " +
                          std::to_string(0.5 * frame.eps_star()) + ")");
    if (o.n_layer < 8 || o.n_layer % 2 != 0) throw ConfigError("n_layer must be even and at least 8");
    if (o.n_s < 16) throw ConfigError("n_s must be at least 16");
    if (o.level < 0 || o.level > 6) throw ConfigError("refinement level must lie in [0, 6]");
    if (!(o.band > 0.0) || o.band >= 1.0) throw ConfigError("band fraction must lie in (0, 1)");
    if (!(o.grading >= 1.0) || o.grading > 2.0) throw ConfigError("grading must lie in [1, 2]");
    if (!(o.box > 0.0)) throw ConfigError("box half-width must be positive");
    return Builder(frame, o).run();
}

}  // namespace curvres
