#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qpgrating/common.hpp"

namespace qpg {

/// Curve callbacks: position, first and second derivative in the parameter t.
struct CurveFunctions {
    std::function<Vec2(double)> eval;
    std::function<Vec2(double)> deriv;
    std::function<Vec2(double)> deriv2;
};

inline constexpr int smooth_infinity = -1;

/// A 2pi-periodic interface z(t) with z(t + 2pi) = z(t) + (2pi, 0).
class ParametrizedInterface {
public:
    ParametrizedInterface(std::string label, std::string kind, std::vector<double> params, CurveFunctions f,
                          int smoothness_class);

    Vec2 eval(double t) const { return f_.eval(t); }
    Vec2 deriv(double t) const { return f_.deriv(t); }
    Vec2 deriv2(double t) const { return f_.deriv2(t); }
    double speed(double t) const { return norm(deriv(t)); }
    /// Unnormalized normal (-z2', z1'), length equal to the speed.
    Vec2 scaled_normal(double t) const;
    /// Unit normal, pointing up for graph-type curves.
    Vec2 normal(double t) const;

    /// Declared regularity p of the curve, or smooth_infinity.
    int smoothness_class() const { return smoothness_; }
    const std::string& label() const { return label_; }
    const std::string& kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }

    struct Range {
        double min, max;
    };
    /// Sampled extent in x2 (dense sample, cached).
    Range x2_range() const { return range_; }
    /// Height of the curve above the abscissa x1 (curves are graphs in x1).
    double height_at(double x1) const;
    /// Parameter t with z1(t) = x1.
    double param_at(double x1) const;

private:
    std::string label_;
    std::string kind_;
    std::vector<double> params_;
    CurveFunctions f_;
    int smoothness_;
    Range range_{};
};

ParametrizedInterface make_flat(double b);
/// z(t) = (t, a sin(q t) + b); q is a positive integer frequency.
ParametrizedInterface make_sinusoid(double a, double b, int q = 1);
/// z(t) = (t, a |sin t|^p + b); p odd >= 3 or p = 2.  a = 0 yields a flat interface.
ParametrizedInterface make_abs_sin_p(double a, double b, int p);

struct BuiltinShape {
    std::string name;
    std::vector<double> params;
};
ParametrizedInterface make_builtin_interface(const BuiltinShape& shape);

/// Samples of an interface on t_q = 2 pi q / n.
struct CurveSamples {
    int n = 0;
    std::vector<Vec2> z, dz, ddz;
    std::vector<double> speed;
};
CurveSamples sample_curve(const ParametrizedInterface& c, int n);

struct MediumStack {
    std::vector<ParametrizedInterface> interfaces;  ///< Gamma_1..Gamma_M, top to bottom
    std::vector<double> eta;                        ///< eta_0 = 1, eta_1..eta_M
    double k0 = 1.0;
    double alpha = 0.0;
    double H = 1.0;

    int M() const { return static_cast<int>(interfaces.size()); }
};

struct Violation {
    std::string invariant;
    int interface = -1;
    double t = 0.0;
    std::string detail;
};

/// Empty iff all stack invariants hold on a 1024-point sample per interface.
std::vector<Violation> validate_stack(const MediumStack& stack);

struct ShiftAndWavenumbers {
    double theta;
    std::vector<double> k;  ///< k_0..k_M
};
ShiftAndWavenumbers derived_shift_and_wavenumbers(const MediumStack& stack);
/// Incident wavevector k0 (sin alpha, -cos alpha).
Vec2 incident_wavevector(const MediumStack& stack);
double quasi_shift(double k0, double alpha);

}  // namespace qpg
