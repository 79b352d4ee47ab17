#ifndef MSF_GRID_HPP
#define MSF_GRID_HPP

#include <complex>
#include <memory>
#include <utility>
#include <vector>

namespace msf {

using cplx = std::complex<double>;

/// Generalized Gauss-Laguerre rule for the weight e^{-x} x^a on (0, inf).
struct Quadrature {
    double a = 0.0;
    std::vector<double> nodes;
    /// Weights against e^{-x} x^a.
    std::vector<double> weights;
    /// Weights for the bare integral: int F(x) dx ~ sum flat_weights[i] F(x_i),
    /// exact when F = e^{-x} x^a * polynomial of degree <= 2n-1.
    std::vector<double> flat_weights;

    std::size_t size() const { return nodes.size(); }
};

Quadrature make_quadrature(double a, int n_nodes);

/// Radial sample points with integration weights for int dF(rho).
///
/// A Gauss grid carries a Gauss-Laguerre rule and supports only integrals.
/// A mapped grid uses rho = log(1 + e^t) on a uniform t mesh; it resolves
/// both the power law rho^{a/2} at the origin and the Gaussian tail, and
/// supports radial derivatives by 8th-order finite differences in t.
class RadialGrid {
public:
    enum class Kind { Gauss, Mapped };

    static std::shared_ptr<const RadialGrid> gauss(double a, int n_nodes);
    static std::shared_ptr<const RadialGrid> mapped(double t_min, double t_max, double h);

    /// Mapped grid covering profiles that behave like rho^{alpha/2} at the
    /// origin (alpha >= alpha_min) and are negligible beyond rho_max.
    static std::shared_ptr<const RadialGrid> mapped_for(double alpha_min, double rho_max,
                                                        double h = 0.025);

    Kind kind() const { return kind_; }
    std::size_t size() const { return rho_.size(); }
    const std::vector<double>& nodes() const { return rho_; }
    const std::vector<double>& weights() const { return w_; }
    double step() const { return h_; }

    /// d/drho on a mapped grid; throws UsageError on a Gauss grid.
    std::vector<cplx> d_rho(const std::vector<cplx>& f) const;
    /// The scale-covariant derivative D = 2 rho d/drho, evaluated as
    /// rho^c D(rho^{-c} f). The result is D f - 2 c f; a c matching the
    /// leading power of f at the origin avoids cancellation there.
    std::vector<cplx> d_log(const std::vector<cplx>& f, double c = 0.0) const;
    /// Relative gap between the 8th- and 6th-order d/dt estimates over
    /// rho >= rho_cut, a resolution indicator for f on this grid.
    double resolution_error(const std::vector<cplx>& f, double rho_cut = 0.0, double c = 0.0) const;
    /// The unnormalized parts: max |d8 - d6| and max |d8|.
    std::pair<double, double> resolution_gap(const std::vector<cplx>& f, double rho_cut = 0.0, double c = 0.0) const;

    bool same_as(const RadialGrid& other) const;

private:
    RadialGrid() = default;
    std::vector<cplx> d_t(const std::vector<cplx>& f, int order, double c = 0.0) const;

    Kind kind_ = Kind::Gauss;
    double h_ = 0.0;
    double t0_ = 0.0;
    std::vector<double> rho_;
    std::vector<double> w_;
    std::vector<double> sig_;  // drho/dt
    std::vector<double> log_rho_;
    // Finite-difference tables: stencil start and weights for each row.
    std::vector<std::vector<double>> fd8_;
    std::vector<std::vector<double>> fd6_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Radial profile with a definite angular index kappa: f(theta, rho) =
/// e^{i kappa theta} values(rho).
struct GridFunction {
    GridPtr grid;
    int angular = 0;
    std::vector<cplx> values;
};

/// Finite-difference weights for the derivative of order `deriv` at x0 from
/// the points xs (Fornberg's algorithm).
std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int deriv);

}  // namespace msf

#endif
