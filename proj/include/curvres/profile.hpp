#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace curvres {

/// The transverse profile of the layer potential.
///
/// V(n) and U(s, n) live on n in [-1, 1]; both evaluate to zero outside that
/// interval.  U is periodic in the arc-length variable s.  The potential in
/// the plane is eps^-2 V(r/eps) + eps^-1 U(s, r/eps) in tubular coordinates.
class PotentialProfile {
public:
    using VFunction = std::function<double(double)>;
    using UFunction = std::function<double(double, double)>;

    PotentialProfile();

    /// V as an expression in `n`, U as an expression in `s` and `n`.
    static PotentialProfile from_expressions(std::string_view v_expr, std::string_view u_expr = "0");

    static PotentialProfile from_functions(VFunction v, UFunction u, bool u_depends_on_s, std::string label = "custom");

    /// V sampled on a uniform grid over [-1, 1]; natural cubic interpolation.
    /// `u_table` is either empty (U = 0) or row-major [s_index][n_index] with
    /// the s rows uniform over [0, u_period) and the n columns uniform over
    /// [-1, 1].
    static PotentialProfile from_samples(std::vector<double> v_samples,
                                         std::vector<std::vector<double>> u_table = {}, double u_period = 1.0);

    double V(double n) const { return (n < -1.0 || n > 1.0) ? 0.0 : v_(n); }
    double U(double s, double n) const { return (u_zero_ || n < -1.0 || n > 1.0) ? 0.0 : u_(s, n); }

    bool u_is_zero() const { return u_zero_; }
    bool u_depends_on_s() const { return u_depends_on_s_; }
    const std::string& label() const { return label_; }

    /// alpha * V with U unchanged.
    PotentialProfile scaled(double alpha) const;

    /// The profile seen from the opposite Frenet frame: V(-n), U(length - s, -n).
    PotentialProfile reflected(double length) const;

    /// Largest |V| and |U| at n = +-1 over a sample of s values; the layer
    /// model assumes these vanish.
    double boundary_magnitude(double u_period, std::size_t s_samples = 64) const;

    /// Throws InputError if V or U is non-finite on the sampling grid.
    void check_finite(std::size_t n_samples, double u_period, std::size_t s_samples = 16) const;

private:
    VFunction v_;
    UFunction u_;
    bool u_zero_ = true;
    bool u_depends_on_s_ = false;
    std::string label_;
};

}  // namespace curvres
