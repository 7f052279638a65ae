#include "polylab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "polylab/kernels.hpp"

namespace polylab::walk {

namespace {

long long gcdll(long long a, long long b) { return std::gcd(a, b); }

// Subgroup generated by the support equals Z^2 iff the gcd of all entries
// and the gcd of all 2x2 minors are both 1 (Smith normal form).
bool generates_z2(const std::vector<Step>& steps) {
    long long d1 = 0, d2 = 0;
    for (const auto& s : steps) {
        d1 = gcdll(d1, s.dx);
        d1 = gcdll(d1, s.dy);
    }
    for (std::size_t i = 0; i < steps.size(); ++i)
        for (std::size_t j = i + 1; j < steps.size(); ++j) {
            long long det = (long long)steps[i].dx * steps[j].dy -
                            (long long)steps[i].dy * steps[j].dx;
            d2 = gcdll(d2, det);
        }
    return std::abs(d1) == 1 && std::abs(d2) == 1;
}

// gcd of {n <= window : q_n(0) > 0} via boolean reachability.
int period_on_window(const std::vector<Step>& steps, int window) {
    const int rad = [&] {
        int m = 0;
        for (const auto& s : steps) m = std::max({m, std::abs(s.dx), std::abs(s.dy)});
        return m * window;
    }();
    const int side = 2 * rad + 1;
    std::vector<char> cur(std::size_t(side) * side, 0), next;
    auto idx = [&](int x, int y) {
        return std::size_t(y + rad) * side + std::size_t(x + rad);
    };
    cur[idx(0, 0)] = 1;
    long long g = 0;
    for (int n = 1; n <= window; ++n) {
        next.assign(cur.size(), 0);
        for (int y = -rad; y <= rad; ++y)
            for (int x = -rad; x <= rad; ++x) {
                if (!cur[idx(x, y)]) continue;
                for (const auto& s : steps) {
                    int nx = x + s.dx, ny = y + s.dy;
                    if (std::abs(nx) <= rad && std::abs(ny) <= rad) next[idx(nx, ny)] = 1;
                }
            }
        cur.swap(next);
        if (cur[idx(0, 0)]) g = gcdll(g, n);
    }
    return int(g);
}

std::size_t roundup8(std::size_t m) { return (m + 7) & ~std::size_t(7); }

}  // namespace

StepDistribution::StepDistribution(std::vector<Step> steps) : steps_(std::move(steps)) {
    if (steps_.empty()) throw DomainError("walk: empty step list");
    double psum = 0.0, mx = 0.0, my = 0.0, cxx = 0.0, cyy = 0.0, cxy = 0.0;
    for (const auto& s : steps_) {
        if (!(s.p > 0.0 && s.p <= 1.0)) throw DomainError("walk: step probability outside (0,1]");
        psum += s.p;
        mx += s.p * s.dx;
        my += s.p * s.dy;
        cxx += s.p * s.dx * s.dx;
        cyy += s.p * s.dy * s.dy;
        cxy += s.p * s.dx * s.dy;
        min_dx_ = std::min(min_dx_, s.dx);
        max_dx_ = std::max(max_dx_, s.dx);
        min_dy_ = std::min(min_dy_, s.dy);
        max_dy_ = std::max(max_dy_, s.dy);
        max_norm_ = std::max({max_norm_, std::abs(s.dx), std::abs(s.dy)});
    }
    if (std::abs(psum - 1.0) > 1e-12) throw DomainError("walk: probabilities do not sum to 1");
    for (const auto& s : steps_) {
        auto mirror = std::find_if(steps_.begin(), steps_.end(), [&](const Step& t) {
            return t.dx == -s.dx && t.dy == -s.dy;
        });
        if (mirror == steps_.end() || std::abs(mirror->p - s.p) > 1e-15)
            throw DomainError("walk: step law is not symmetric");
    }
    if (std::abs(mx) > 1e-15 || std::abs(my) > 1e-15)
        throw DomainError("walk: nonzero mean displacement");
    if (std::abs(cxx - cyy) > 1e-12 || std::abs(cxy) > 1e-12 || cxx <= 0.0)
        throw DomainError("walk: covariance is not a positive multiple of the identity");
    cov_scale_ = 0.5 * (cxx + cyy);
    if (!generates_z2(steps_)) throw DomainError("walk: not irreducible on Z^2");
    const int diameter = 2 * max_norm_;
    if (period_on_window(steps_, std::max(2, 2 * diameter)) != 1)
        throw DomainError("walk: aperiodicity check failed (gcd of return times != 1 on window)");
}

double StepDistribution::char_fn(double k1, double k2) const {
    double s = 0.0;
    for (const auto& st : steps_) s += st.p * std::cos(k1 * st.dx + k2 * st.dy);
    return s;
}

StepDistribution default_unit_covariance_walk() {
    std::vector<Step> s;
    const double e = 1.0 / 8.0, d = 1.0 / 16.0;
    s.push_back({1, 0, e});
    s.push_back({-1, 0, e});
    s.push_back({0, 1, e});
    s.push_back({0, -1, e});
    s.push_back({1, 1, d});
    s.push_back({1, -1, d});
    s.push_back({-1, 1, d});
    s.push_back({-1, -1, d});
    s.push_back({2, 0, d});
    s.push_back({-2, 0, d});
    s.push_back({0, 2, d});
    s.push_back({0, -2, d});
    return StepDistribution(std::move(s));
}

StepDistribution lazy_quarter_walk() {
    std::vector<Step> s;
    s.push_back({0, 0, 0.5});
    s.push_back({1, 0, 0.125});
    s.push_back({-1, 0, 0.125});
    s.push_back({0, 1, 0.125});
    s.push_back({0, -1, 0.125});
    return StepDistribution(std::move(s));
}

StepDistribution load_walk(const std::string& file_or_name) {
    if (file_or_name.empty() || file_or_name == "default") return default_unit_covariance_walk();
    if (file_or_name == "lazy") return lazy_quarter_walk();
    std::ifstream in(file_or_name);
    if (!in) throw ConfigError("walk: cannot open spec file " + file_or_name);
    nlohmann::json j;
    in >> j;
    std::vector<Step> steps;
    for (const auto& e : j.at("steps")) {
        steps.push_back({e.at("dx").get<int>(), e.at("dy").get<int>(), e.at("p").get<double>()});
    }
    return StepDistribution(std::move(steps));
}

Field2D convolve_step(const StepDistribution& walk, const Field2D& in) {
    Box ob = in.box.dilated(walk.min_dx(), walk.max_dx(), walk.min_dy(), walk.max_dy());
    Field2D out(ob);
    const auto& k = kern::active();
    for (const auto& s : walk.steps()) {
        // out(x,y) += p * in(x-dx, y-dy): shift the whole input box.
        for (int y = in.box.y0; y <= in.box.y1(); ++y) {
            double* dst = out.row(y + s.dy) + (in.box.x0 + s.dx - ob.x0);
            k.axpy(dst, in.row(y), s.p, std::size_t(in.box.nx));
        }
    }
    return out;
}

KernelTable::KernelTable(StepDistribution walk, int n_max, KernelTableOptions opts)
    : walk_(std::move(walk)), n_max_(n_max) {
    if (n_max < 0) throw DomainError("kernel table: n_max must be >= 0");
    const long m_ret = opts.returns_m_max >= 0 ? opts.returns_m_max : 2L * n_max;

    // Rolling slice peak memory.
    const std::size_t span_x = std::size_t(walk_.max_dx() - walk_.min_dx()) * n_max + 1;
    const std::size_t span_y = std::size_t(walk_.max_dy() - walk_.min_dy()) * n_max + 1;
    if (2 * span_x * span_y * sizeof(double) > opts.mem_cap_bytes)
        throw ResourceError("kernel table: support box exceeds memory cap");

    returns_.assign(std::size_t(std::max(m_ret, 2L * n_max)) + 1, 0.0);
    returns_[0] = 1.0;

    Field2D cur(Box{0, 0, 1, 1});
    cur.at(0, 0) = 1.0;
    slices_.emplace(0, cur);

    const auto& k = kern::active();
    Field2D prev = cur;
    for (int n = 1; n <= n_max; ++n) {
        Field2D next = convolve_step(walk_, prev);
        // q_{2n}(0) = sum_x q_n(x)^2 and q_{2n-1}(0) = sum_x q_{n-1}(x) q_n(x).
        returns_[std::size_t(2 * n)] = k.sumsq(next.v.data(), next.v.size());
        {
            Kahan odd;
            for (int y = prev.box.y0; y <= prev.box.y1(); ++y) {
                const double* a = prev.row(y);
                const double* b = next.row(y) + (prev.box.x0 - next.box.x0);
                odd.add(k.dot(a, b, std::size_t(prev.box.nx)));
            }
            returns_[std::size_t(2 * n - 1)] = odd.value();
        }
        if (n <= opts.dense_upto || opts.checkpoints.count(n)) slices_.emplace(n, next);
        prev = std::move(next);
    }
    if (m_ret > 2L * n_max) {
        auto sp = spectral_returns(walk_, m_ret);
        for (std::size_t m = std::size_t(2 * n_max) + 1; m < sp.size(); ++m)
            returns_[m] = sp[m];
    }
}

const Field2D& KernelTable::slice(int n) const {
    auto it = slices_.find(n);
    if (it == slices_.end()) throw DomainError("kernel table: slice not stored: n=" + std::to_string(n));
    return it->second;
}

double KernelTable::return_prob(long m) const {
    if (m < 0 || m >= long(returns_.size()))
        throw DomainError("kernel table: return probability out of range: m=" + std::to_string(m));
    return returns_[std::size_t(m)];
}

namespace {

// Flush tiny magnitudes so the power iteration never lingers in denormals.
void flush_tiny(std::vector<double>& t) {
    for (double& x : t)
        if (std::abs(x) < 1e-250) x = 0.0;
}

}  // namespace

std::vector<double> spectral_returns(const StepDistribution& walk, long m_max) {
    std::vector<double> out(std::size_t(m_max) + 1, 0.0);
    out[0] = 1.0;
    if (m_max == 0) return out;

    const double c = walk.cov_scale();
    const std::size_t exact_M = std::size_t(2) * walk.max_step_norm() * std::size_t(m_max) + 2;
    std::size_t M;
    if (exact_M <= 1024) {
        M = roundup8(exact_M);
    } else {
        double alias = 10.0 * std::sqrt(std::max(c, 1.0) * double(m_max));
        M = roundup8(std::size_t(std::max(512.0, alias + 16.0)));
    }

    // Torus grid with the D4 wedge 0 <= b <= a <= M/2; weights fold the
    // k -> -k and k1 <-> k2 symmetries of the (isotropic, symmetric) walk.
    const std::size_t H = M / 2;
    std::vector<double> v, t;
    v.reserve((H + 1) * (H + 2) / 2);
    t.reserve(v.capacity());
    const double step = 2.0 * kPi / double(M);
    for (std::size_t a = 0; a <= H; ++a) {
        const double wa = (a == 0 || a == H) ? 1.0 : 2.0;
        for (std::size_t b = 0; b <= a; ++b) {
            const double wb = (b == 0 || b == H) ? 1.0 : 2.0;
            const double swap = (b < a) ? 2.0 : 1.0;
            v.push_back(walk.char_fn(step * double(a), step * double(b)));
            t.push_back(wa * wb * swap / (double(M) * double(M)));
        }
    }

    const auto& k = kern::active();
    for (long m = 1; m <= m_max; ++m) {
        out[std::size_t(m)] = k.power_step(t.data(), v.data(), t.size());
        if ((m & 15) == 0) flush_tiny(t);
    }
    return out;
}

std::vector<double> pair_collision_moments(const StepDistribution& walk,
                                           const std::vector<PointI>& sites,
                                           const std::vector<double>& weights,
                                           int i_max) {
    if (sites.size() != weights.size()) throw DomainError("pair moments: size mismatch");
    if (sites.empty() || i_max < 1) return std::vector<double>(std::size_t(std::max(i_max, 0)) + 1, 0.0);

    int lo_x = sites[0].x, hi_x = sites[0].x, lo_y = sites[0].y, hi_y = sites[0].y;
    for (const auto& s : sites) {
        lo_x = std::min(lo_x, s.x);
        hi_x = std::max(hi_x, s.x);
        lo_y = std::min(lo_y, s.y);
        hi_y = std::max(hi_y, s.y);
    }
    const std::size_t diam = std::size_t(std::max(hi_x - lo_x, hi_y - lo_y));
    const double c = walk.cov_scale();
    const std::size_t exact_M =
        diam + std::size_t(4) * walk.max_step_norm() * std::size_t(i_max) + 2;
    std::size_t M;
    if (exact_M <= 1024) {
        M = roundup8(exact_M);
    } else {
        double alias = 10.0 * std::sqrt(std::max(c, 1.0) * 2.0 * double(i_max));
        M = roundup8(std::size_t(double(diam) + std::max(256.0, alias + 32.0)));
    }

    // |phi_hat(k)|^2 via a separable partial DFT (group sites by x).
    std::map<int, std::vector<std::pair<int, double>>> by_x;
    for (std::size_t s = 0; s < sites.size(); ++s)
        by_x[sites[s].x].push_back({sites[s].y, weights[s]});

    const double step = 2.0 * kPi / double(M);
    std::vector<double> hre(by_x.size() * M), him(by_x.size() * M);
    std::vector<int> xs;
    xs.reserve(by_x.size());
    {
        std::size_t row = 0;
        for (const auto& [X, pts] : by_x) {
            xs.push_back(X);
            for (std::size_t b = 0; b < M; ++b) {
                const double k2 = step * double(b);
                double re = 0.0, im = 0.0;
                for (const auto& [Y, w] : pts) {
                    re += w * std::cos(k2 * Y);
                    im += w * std::sin(k2 * Y);
                }
                hre[row * M + b] = re;
                him[row * M + b] = im;
            }
            ++row;
        }
    }

    std::vector<double> t(M * M), v(M * M);
    const double inv_m2 = 1.0 / (double(M) * double(M));
    for (std::size_t a = 0; a < M; ++a) {
        const double k1 = step * double(a);
        std::vector<double> cx(xs.size()), sx(xs.size());
        for (std::size_t r = 0; r < xs.size(); ++r) {
            cx[r] = std::cos(k1 * xs[r]);
            sx[r] = std::sin(k1 * xs[r]);
        }
        for (std::size_t b = 0; b < M; ++b) {
            double re = 0.0, im = 0.0;
            for (std::size_t r = 0; r < xs.size(); ++r) {
                re += cx[r] * hre[r * M + b] - sx[r] * him[r * M + b];
                im += cx[r] * him[r * M + b] + sx[r] * hre[r * M + b];
            }
            t[a * M + b] = (re * re + im * im) * inv_m2;
            const double phi = walk.char_fn(k1, step * double(b));
            v[a * M + b] = phi * phi;
        }
    }

    std::vector<double> out(std::size_t(i_max) + 1, 0.0);
    const auto& k = kern::active();
    for (int i = 1; i <= i_max; ++i) {
        out[std::size_t(i)] = k.power_step(t.data(), v.data(), t.size());
        if ((i & 15) == 0) flush_tiny(t);
    }
    return out;
}

double collision_mass(const KernelTable& table, long N) {
    if (N < 0 || 2 * N > table.returns_m_max())
        throw DomainError("collision mass: N out of range for this table");
    Kahan s;
    for (long n = 1; n <= N; ++n) s.add(table.return_prob(2 * n));
    return s.value();
}

double heat_kernel(double t, Vec2 x, double cov_scale) {
    if (!(t > 0.0)) throw DomainError("heat kernel: t must be positive");
    if (!(cov_scale > 0.0)) throw DomainError("heat kernel: covariance scale must be positive");
    const double ct = cov_scale * t;
    return std::exp(-(x.x * x.x + x.y * x.y) / (2.0 * ct)) / (2.0 * kPi * ct);
}

double llt_deviation(const KernelTable& table, int n) {
    if (n < 1 || n > table.n_max()) throw DomainError("llt deviation: n out of range");
    const Field2D& q = table.slice(n);
    const double c = table.walk().cov_scale();
    double sup = 0.0;
    for (int y = q.box.y0; y <= q.box.y1(); ++y) {
        const double* row = q.row(y);
        for (int x = q.box.x0; x <= q.box.x1(); ++x) {
            const double p = heat_kernel(double(n), Vec2{double(x), double(y)}, c);
            sup = std::max(sup, std::abs(row[x - q.box.x0] - p));
        }
    }
    return sup;
}

}  // namespace polylab::walk
