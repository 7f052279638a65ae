#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>

#include "polylab/core.hpp"

namespace polylab::fn {

// Macroscopic-coordinate test functions: the initial conditions phi and the
// pairing functions psi.  Coordinates are x/sqrt(N).
//
//   constant(c)            : c everywhere (needs an explicit window as phi)
//   gaussian(cx, cy, var)  : normalized heat kernel p_var(u - c)
//   bump(cx, cy, r)        : smooth normalized bump, support |u-c| < r
//   indicator(cx, cy, r)   : 1 on the closed disk |u-c| <= r
// Linear combinations of two functions are supported for polarization and
// disjoint-support constructions.
class TestFunction {
  public:
    enum class Kind { Constant, Gaussian, Bump, Indicator, LinComb };

    static TestFunction constant(double value,
                                 std::optional<std::array<double, 4>> window = {});
    static TestFunction gaussian(Vec2 center, double variance);
    static TestFunction bump(Vec2 center, double radius);
    static TestFunction indicator(Vec2 center, double radius);
    static TestFunction lincomb(double c1, TestFunction f1, double c2, TestFunction f2);

    // Parse "const(1)", "const(1;box=-1,-1,1,1)", "gaussian(0,0,0.5)",
    // "bump(0,0,1)", "indicator(0.5,0,0.4)".
    static TestFunction parse(const std::string& spec);

    Kind kind() const { return kind_; }
    double eval(Vec2 u) const;
    double operator()(Vec2 u) const { return eval(u); }

    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const { return p0_; }
    Vec2 center() const { return center_; }
    // value / variance / radius, depending on the kind
    double param() const { return p0_; }

    // Separable as A * gx(u.x) * gy(u.y)?  (constant and gaussian)
    bool separable() const;
    double amplitude() const;      // A
    double axis_x(double x) const;  // gx
    double axis_y(double y) const;  // gy

    // Effective support window [xmin,xmax]x[ymin,ymax] in macroscopic
    // coordinates; Gaussians are truncated at 8 standard deviations.
    // Throws DomainError for an unwindowed constant.
    std::array<double, 4> support() const;
    bool has_window() const;

    std::string describe() const;

  private:
    TestFunction() = default;
    Kind kind_ = Kind::Constant;
    Vec2 center_{};
    double p0_ = 0.0;  // value / variance / radius
    std::optional<std::array<double, 4>> window_;
    // LinComb
    double c1_ = 0.0, c2_ = 0.0;
    std::shared_ptr<TestFunction> f1_, f2_;
};

// Normalization constant of the 2d bump: integral of exp(-1/(1-|v|^2)) dv
// over the unit disk.
double bump_unit_mass();

}  // namespace polylab::fn
