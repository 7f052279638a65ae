#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace polylab {

inline constexpr double kPi = std::numbers::pi_v<double>;
inline constexpr double kEulerGamma = std::numbers::egamma_v<double>;

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : Error {
    using Error::Error;
};
struct CalibrationError : Error {
    using Error::Error;
};
struct EmptySupportError : Error {
    using Error::Error;
};
struct OverflowError : Error {
    using Error::Error;
};
struct GridTooCoarseError : Error {
    using Error::Error;
};
struct StreamMismatchError : Error {
    using Error::Error;
};
struct ResourceError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Small geometry helpers

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct PointI {
    int x = 0;
    int y = 0;
    friend bool operator==(PointI a, PointI b) { return a.x == b.x && a.y == b.y; }
};

// Inclusive integer rectangle [x0, x0+nx) x [y0, y0+ny).
struct Box {
    int x0 = 0;
    int y0 = 0;
    int nx = 0;
    int ny = 0;

    int x1() const { return x0 + nx - 1; }  // last column
    int y1() const { return y0 + ny - 1; }  // last row
    std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
    bool empty() const { return nx <= 0 || ny <= 0; }
    bool contains(int x, int y) const {
        return x >= x0 && x <= x1() && y >= y0 && y <= y1();
    }
    // Minkowski dilation by [dx0,dx1] x [dy0,dy1].
    Box dilated(int dx0, int dx1, int dy0, int dy1) const {
        return Box{x0 + dx0, y0 + dy0, nx + (dx1 - dx0), ny + (dy1 - dy0)};
    }
};

// Dense row-major field over an integer box; rows are y, x contiguous.
struct Field2D {
    Box box;
    std::vector<double> v;

    Field2D() = default;
    explicit Field2D(Box b) : box(b), v(b.size(), 0.0) {}

    double* row(int y) { return v.data() + std::size_t(y - box.y0) * box.nx; }
    const double* row(int y) const {
        return v.data() + std::size_t(y - box.y0) * box.nx;
    }
    double& at(int x, int y) { return row(y)[x - box.x0]; }
    double at(int x, int y) const { return row(y)[x - box.x0]; }
    double get(int x, int y) const { return box.contains(x, y) ? at(x, y) : 0.0; }
};

// ---------------------------------------------------------------------------
// Compensated (Kahan) accumulation

struct Kahan {
    double sum = 0.0;
    double c = 0.0;

    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

inline double kahan_sum(const double* v, std::size_t n) {
    Kahan k;
    for (std::size_t i = 0; i < n; ++i) k.add(v[i]);
    return k.value();
}

}  // namespace polylab
