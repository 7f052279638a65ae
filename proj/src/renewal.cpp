#include "polylab/renewal.hpp"

#include <algorithm>
#include <cmath>

#include "polylab/kernels.hpp"
#include "polylab/polymer.hpp"

namespace polylab::renewal {

namespace {

bool axis_symmetric(const walk::StepDistribution& w) {
    for (const auto& s : w.steps()) {
        bool found = false;
        for (const auto& t : w.steps())
            if (t.dx == -s.dx && t.dy == s.dy && std::abs(t.p - s.p) <= 1e-15) found = true;
        if (!found) return false;
    }
    return true;
}

// DCT-I matrix for quarter grids of n = R+1 points (logical period 2R):
// X[k] = sum_j c_j cos(pi j k / R) x[j], c_j = 1 at the edges, 2 inside.
// Self-inverse up to the factor 1/(2R).
struct DctPlan {
    int n = 0;
    std::vector<double> mat;  // n x n row-major

    explicit DctPlan(int npts) : n(npts), mat(std::size_t(npts) * npts) {
        const int R = n - 1;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
                const double cj = (j == 0 || j == R) ? 1.0 : 2.0;
                mat[std::size_t(k) * n + j] = cj * std::cos(kPi * double(j) * double(k) / R);
            }
    }

    // 2D transform (rows then columns) of an n x n quarter grid.
    void apply(std::vector<double>& a, std::vector<double>& scratch) const {
        const auto& kn = kern::active();
        scratch.assign(a.size(), 0.0);
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < n; ++k)
                scratch[std::size_t(r) * n + k] =
                    kn.dot(mat.data() + std::size_t(k) * n, a.data() + std::size_t(r) * n,
                           std::size_t(n));
        // columns: transpose, transform rows, transpose back
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < r; ++c)
                std::swap(scratch[std::size_t(r) * n + c], scratch[std::size_t(c) * n + r]);
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < n; ++k)
                a[std::size_t(k) * n + r] =
                    kn.dot(mat.data() + std::size_t(k) * n, scratch.data() + std::size_t(r) * n,
                           std::size_t(n));
    }
};

}  // namespace

RenewalTable::RenewalTable(const disorder::CriticalCoupling& coupling,
                           const walk::KernelTable& kernel, int n_max, RenewalOptions opts) {
    if (n_max < 0) throw DomainError("renewal: n_max must be >= 0");
    if (kernel.returns_m_max() < 2L * n_max)
        throw DomainError("renewal: kernel table lacks q_{2j}(0) up to 2 n_max");
    sigma2_ = coupling.sigma2;
    N_ = coupling.N;
    theta_ = coupling.theta;

    totals_.resize(std::size_t(n_max) + 1);
    prefix_.resize(std::size_t(n_max) + 1);
    totals_[0] = sigma2_;
    prefix_[0] = sigma2_;
    Kahan pref;
    pref.add(sigma2_);
    for (int n = 1; n <= n_max; ++n) {
        Kahan s;
        for (int m = 0; m < n; ++m)
            s.add(totals_[std::size_t(m)] * kernel.return_prob(2L * (n - m)));
        totals_[std::size_t(n)] = sigma2_ * s.value();
        pref.add(totals_[std::size_t(n)]);
        prefix_[std::size_t(n)] = pref.value();
    }

    if (opts.n_spatial > 0) {
        const auto& w = kernel.walk();
        if (!axis_symmetric(w))
            throw DomainError("renewal: spatial slices need an axis-symmetric walk");
        n_spatial_ = std::min(opts.n_spatial, n_max);
        radius_ = w.max_step_norm() * n_spatial_;
        const int n = radius_ + 1;
        const std::size_t quarter = std::size_t(n) * n;
        const std::size_t need = quarter * std::size_t(2 * n_spatial_ + 2) * sizeof(double);
        if (need > opts.mem_cap_bytes)
            throw ResourceError("renewal: spatial slices exceed memory cap");

        DctPlan plan(n);
        std::vector<double> scratch;

        // Spectra of the squared kernels q_j^2, j = 1..n_spatial.
        std::vector<std::vector<double>> csq(std::size_t(n_spatial_) + 1);
        {
            Field2D slice(Box{0, 0, 1, 1});
            slice.at(0, 0) = 1.0;
            for (int j = 1; j <= n_spatial_; ++j) {
                slice = walk::convolve_step(w, slice);
                std::vector<double> q(quarter, 0.0);
                for (int y = 0; y <= std::min(radius_, slice.box.y1()); ++y)
                    for (int x = 0; x <= std::min(radius_, slice.box.x1()); ++x) {
                        const double v = slice.get(x, y);
                        q[std::size_t(y) * n + x] = v * v;
                    }
                plan.apply(q, scratch);
                csq[std::size_t(j)] = std::move(q);
            }
        }

        // Spectral-domain renewal recursion; inverse-transform each slice.
        std::vector<std::vector<double>> uhat(std::size_t(n_spatial_) + 1);
        uhat[0].assign(quarter, sigma2_);
        spatial_.resize(std::size_t(n_spatial_) + 1);
        spatial_[0].assign(quarter, 0.0);
        spatial_[0][0] = sigma2_;
        const double inv_scale = 1.0 / (4.0 * double(radius_) * double(radius_));
        for (int nn = 1; nn <= n_spatial_; ++nn) {
            std::vector<double> acc(quarter, 0.0);
            for (int m = 0; m < nn; ++m) {
                const auto& um = uhat[std::size_t(m)];
                const auto& cq = csq[std::size_t(nn - m)];
                for (std::size_t i = 0; i < quarter; ++i) acc[i] += um[i] * cq[i];
            }
            for (std::size_t i = 0; i < quarter; ++i) acc[i] *= sigma2_;
            uhat[std::size_t(nn)] = acc;
            plan.apply(acc, scratch);
            for (std::size_t i = 0; i < quarter; ++i) acc[i] *= inv_scale;
            spatial_[std::size_t(nn)] = std::move(acc);
        }
    }
}

RenewalTable build_totals(const disorder::CriticalCoupling& coupling,
                          const walk::KernelTable& kernel, int n_max, RenewalOptions opts) {
    return RenewalTable(coupling, kernel, n_max, opts);
}

double RenewalTable::total(int n) const {
    if (n < 0 || n > n_max()) throw DomainError("renewal: n out of range");
    return totals_[std::size_t(n)];
}

double RenewalTable::prefix(int m) const {
    if (m < 0 || m > n_max()) throw DomainError("renewal: prefix index out of range");
    return prefix_[std::size_t(m)];
}

double RenewalTable::spatial(int n, int x, int y) const {
    if (n < 0 || n > n_spatial_) throw DomainError("renewal: spatial slice not built");
    const int ax = std::abs(x), ay = std::abs(y);
    if (ax > radius_ || ay > radius_) return 0.0;
    return spatial_[std::size_t(n)][std::size_t(ay) * (radius_ + 1) + ax];
}

double RenewalTable::spatial_sum(int n) const {
    if (n < 0 || n > n_spatial_) throw DomainError("renewal: spatial slice not built");
    const auto& q = spatial_[std::size_t(n)];
    Kahan s;
    for (int y = 0; y <= radius_; ++y) {
        const double wy = y == 0 ? 1.0 : 2.0;
        for (int x = 0; x <= radius_; ++x) {
            const double wx = x == 0 ? 1.0 : 2.0;
            s.add(wx * wy * q[std::size_t(y) * (radius_ + 1) + x]);
        }
    }
    return s.value();
}

double compare_to_G(const RenewalTable& table, long N,
                    const std::function<double(double)>& G_theta) {
    const double sig2 = table.sigma2();
    const double scale = sig2 * std::log(double(N)) / double(N);
    const int n_lo = int(std::ceil(0.1 * double(N)));
    const int n_hi = int(N);
    if (n_hi > table.n_max()) throw DomainError("compare_to_G: table too short");
    double worst = 0.0;
    for (int n = n_lo; n <= n_hi; ++n) {
        const double pred = scale * G_theta(double(n) / double(N));
        worst = std::max(worst, std::abs(table.total(n) / pred - 1.0));
    }
    return worst;
}

double laplace_sum(const RenewalTable& table, double lambda, long N, double T) {
    const long top = std::lround(double(N) * T);
    if (top > table.n_max()) throw DomainError("laplace_sum: table too short");
    Kahan s;
    for (long u = 1; u <= top; ++u)
        s.add(std::exp(-lambda * double(u) / double(N)) * table.total(int(u)));
    return s.value();
}

double discrete_variance_mass(const fn::TestFunction& phi, long N, double t,
                              const RenewalTable& table, const walk::StepDistribution& walk,
                              const fn::TestFunction& psi) {
    if (!psi.is_constant())
        throw DomainError("discrete_variance_mass: exact route requires constant psi");
    const long K = long(std::floor(double(N) * t));
    if (K == 0) return 0.0;
    if (K - 1 > table.n_max()) throw DomainError("discrete_variance_mass: renewal table too short");

    Field2D phi0 = polymer::lattice_initial(phi, N);
    std::vector<PointI> sites;
    std::vector<double> weights;
    sites.reserve(phi0.box.size());
    for (int y = phi0.box.y0; y <= phi0.box.y1(); ++y) {
        const double* row = phi0.row(y);
        for (int i = 0; i < phi0.box.nx; ++i) {
            if (row[i] != 0.0) {
                sites.push_back({phi0.box.x0 + i, y});
                weights.push_back(row[i]);
            }
        }
    }
    const auto B = walk::pair_collision_moments(walk, sites, weights, int(K));
    Kahan s;
    for (long i = 1; i <= K; ++i)
        s.add(B[std::size_t(i)] * table.prefix(int(K - i)));
    const double c = psi.constant_value();
    return c * c * s.value() / (double(N) * double(N));
}

}  // namespace polylab::renewal
