#include "polylab/test_function.hpp"

#include <cmath>
#include <sstream>

namespace polylab::fn {

namespace {

double bump_profile(double rho2) {
    // exp(-1/(1-rho^2)) on rho^2 < 1, 0 outside.
    if (rho2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - rho2));
}

}  // namespace

double bump_unit_mass() {
    // 2 pi int_0^1 exp(-1/(1-r^2)) r dr = pi int_0^1 exp(-1/w) dw.
    static const double mass = [] {
        // Composite Simpson on [0,1]; integrand is smooth and vanishes to
        // all orders at 0.
        const int n = 1 << 14;
        const double h = 1.0 / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = i * h;
            const double f = w > 0.0 ? std::exp(-1.0 / w) : 0.0;
            const double coef = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += coef * f;
        }
        return kPi * s * h / 3.0;
    }();
    return mass;
}

TestFunction TestFunction::constant(double value, std::optional<std::array<double, 4>> window) {
    TestFunction f;
    f.kind_ = Kind::Constant;
    f.p0_ = value;
    f.window_ = window;
    return f;
}

TestFunction TestFunction::gaussian(Vec2 center, double variance) {
    if (!(variance > 0.0)) throw DomainError("gaussian test function: variance must be > 0");
    TestFunction f;
    f.kind_ = Kind::Gaussian;
    f.center_ = center;
    f.p0_ = variance;
    return f;
}

TestFunction TestFunction::bump(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw DomainError("bump test function: radius must be > 0");
    TestFunction f;
    f.kind_ = Kind::Bump;
    f.center_ = center;
    f.p0_ = radius;
    return f;
}

TestFunction TestFunction::indicator(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw DomainError("indicator test function: radius must be > 0");
    TestFunction f;
    f.kind_ = Kind::Indicator;
    f.center_ = center;
    f.p0_ = radius;
    return f;
}

TestFunction TestFunction::lincomb(double c1, TestFunction f1, double c2, TestFunction f2) {
    TestFunction f;
    f.kind_ = Kind::LinComb;
    f.c1_ = c1;
    f.c2_ = c2;
    f.f1_ = std::make_shared<TestFunction>(std::move(f1));
    f.f2_ = std::make_shared<TestFunction>(std::move(f2));
    return f;
}

double TestFunction::eval(Vec2 u) const {
    switch (kind_) {
        case Kind::Constant:
            return p0_;
        case Kind::Gaussian: {
            const double dx = u.x - center_.x, dy = u.y - center_.y;
            return std::exp(-(dx * dx + dy * dy) / (2.0 * p0_)) / (2.0 * kPi * p0_);
        }
        case Kind::Bump: {
            const double dx = u.x - center_.x, dy = u.y - center_.y;
            const double rho2 = (dx * dx + dy * dy) / (p0_ * p0_);
            return bump_profile(rho2) / (p0_ * p0_ * bump_unit_mass());
        }
        case Kind::Indicator: {
            const double dx = u.x - center_.x, dy = u.y - center_.y;
            return (dx * dx + dy * dy <= p0_ * p0_) ? 1.0 : 0.0;
        }
        case Kind::LinComb:
            return c1_ * f1_->eval(u) + c2_ * f2_->eval(u);
    }
    return 0.0;
}

bool TestFunction::separable() const {
    return kind_ == Kind::Constant || kind_ == Kind::Gaussian;
}

double TestFunction::amplitude() const {
    switch (kind_) {
        case Kind::Constant:
            return p0_;
        case Kind::Gaussian:
            return 1.0 / (2.0 * kPi * p0_);
        default:
            throw DomainError("test function: not separable");
    }
}

double TestFunction::axis_x(double x) const {
    switch (kind_) {
        case Kind::Constant:
            return 1.0;
        case Kind::Gaussian: {
            const double d = x - center_.x;
            return std::exp(-d * d / (2.0 * p0_));
        }
        default:
            throw DomainError("test function: not separable");
    }
}

double TestFunction::axis_y(double y) const {
    switch (kind_) {
        case Kind::Constant:
            return 1.0;
        case Kind::Gaussian: {
            const double d = y - center_.y;
            return std::exp(-d * d / (2.0 * p0_));
        }
        default:
            throw DomainError("test function: not separable");
    }
}

bool TestFunction::has_window() const {
    switch (kind_) {
        case Kind::Constant:
            return window_.has_value();
        case Kind::LinComb:
            return f1_->has_window() && f2_->has_window();
        default:
            return true;
    }
}

std::array<double, 4> TestFunction::support() const {
    switch (kind_) {
        case Kind::Constant:
            if (!window_) throw DomainError("constant test function used as phi needs a window");
            return *window_;
        case Kind::Gaussian: {
            const double r = 8.0 * std::sqrt(p0_);
            return {center_.x - r, center_.x + r, center_.y - r, center_.y + r};
        }
        case Kind::Bump:
        case Kind::Indicator:
            return {center_.x - p0_, center_.x + p0_, center_.y - p0_, center_.y + p0_};
        case Kind::LinComb: {
            auto a = f1_->support();
            auto b = f2_->support();
            return {std::min(a[0], b[0]), std::max(a[1], b[1]), std::min(a[2], b[2]),
                    std::max(a[3], b[3])};
        }
    }
    throw DomainError("test function: unsupported kind");
}

std::string TestFunction::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Constant:
            os << "const(" << p0_;
            if (window_)
                os << ";box=" << (*window_)[0] << "," << (*window_)[2] << "," << (*window_)[1]
                   << "," << (*window_)[3];
            os << ")";
            break;
        case Kind::Gaussian:
            os << "gaussian(" << center_.x << "," << center_.y << "," << p0_ << ")";
            break;
        case Kind::Bump:
            os << "bump(" << center_.x << "," << center_.y << "," << p0_ << ")";
            break;
        case Kind::Indicator:
            os << "indicator(" << center_.x << "," << center_.y << "," << p0_ << ")";
            break;
        case Kind::LinComb:
            os << c1_ << "*" << f1_->describe() << "+" << c2_ << "*" << f2_->describe();
            break;
    }
    return os.str();
}

namespace {

std::vector<double> parse_args(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace

TestFunction TestFunction::parse(const std::string& spec) {
    const auto open = spec.find('(');
    const auto close = spec.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ConfigError("test function: cannot parse '" + spec + "'");
    const std::string name = spec.substr(0, open);
    std::string inner = spec.substr(open + 1, close - open - 1);

    std::optional<std::array<double, 4>> window;
    const auto semi = inner.find(';');
    if (semi != std::string::npos) {
        std::string opt = inner.substr(semi + 1);
        inner = inner.substr(0, semi);
        if (opt.rfind("box=", 0) == 0) {
            auto b = parse_args(opt.substr(4));
            if (b.size() != 4) throw ConfigError("test function: box needs 4 numbers");
            // input order x0,y0,x1,y1 -> stored {xmin, xmax, ymin, ymax}
            window = std::array<double, 4>{b[0], b[2], b[1], b[3]};
        } else {
            throw ConfigError("test function: unknown option '" + opt + "'");
        }
    }
    auto a = parse_args(inner);
    if (name == "const" || name == "constant") {
        if (a.size() != 1) throw ConfigError("const(value) expected");
        return constant(a[0], window);
    }
    if (name == "gaussian") {
        if (a.size() != 3) throw ConfigError("gaussian(cx,cy,var) expected");
        return gaussian({a[0], a[1]}, a[2]);
    }
    if (name == "bump") {
        if (a.size() != 3) throw ConfigError("bump(cx,cy,r) expected");
        return bump({a[0], a[1]}, a[2]);
    }
    if (name == "indicator") {
        if (a.size() != 3) throw ConfigError("indicator(cx,cy,r) expected");
        return indicator({a[0], a[1]}, a[2]);
    }
    throw ConfigError("test function: unknown kind '" + name + "'");
}

}  // namespace polylab::fn
