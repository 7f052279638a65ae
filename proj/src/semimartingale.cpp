#include "polylab/semimartingale.hpp"

#include <algorithm>
#include <cmath>

#include "polylab/kernels.hpp"

namespace polylab::semimart {

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}
long ceil_div(long a, long b) { return -floor_div(-a, b); }

// psi_N values over a lattice box (separable fast path avoids per-site exp).
Field2D build_psi_values(const fn::TestFunction& psi, long N, const Box& box) {
    Field2D vals(box);
    const double rtN = std::sqrt(double(N));
    if (psi.is_constant()) {
        std::fill(vals.v.begin(), vals.v.end(), psi.constant_value());
        return vals;
    }
    if (psi.separable()) {
        std::vector<double> gx(std::size_t(box.nx));
        for (int i = 0; i < box.nx; ++i) gx[std::size_t(i)] = psi.axis_x((box.x0 + i) / rtN);
        const double amp = psi.amplitude();
        for (int y = box.y0; y <= box.y1(); ++y) {
            const double a = amp * psi.axis_y(y / rtN);
            double* row = vals.row(y);
            for (int i = 0; i < box.nx; ++i) row[i] = a * gx[std::size_t(i)];
        }
        return vals;
    }
    for (int y = box.y0; y <= box.y1(); ++y) {
        double* row = vals.row(y);
        for (int i = 0; i < box.nx; ++i) row[i] = psi.eval({(box.x0 + i) / rtN, y / rtN});
    }
    return vals;
}

double pairing_with_values(const Field2D& f, const Field2D& vals, long N) {
    const auto& k = kern::active();
    Kahan s;
    for (int y = f.box.y0; y <= f.box.y1(); ++y) {
        const double* pv = vals.row(y) + (f.box.x0 - vals.box.x0);
        s.add(k.dot(f.row(y), pv, std::size_t(f.box.nx)));
    }
    return s.value() / double(N);
}

}  // namespace

double discrete_laplacian(const walk::StepDistribution& w,
                          const std::function<double(Vec2)>& psi, long N, PointI x) {
    const double rtN = std::sqrt(double(N));
    const double c = psi({x.x / rtN, x.y / rtN});
    Kahan s;
    for (const auto& st : w.steps())
        s.add(st.p * (psi({(x.x + st.dx) / rtN, (x.y + st.dy) / rtN}) - c));
    return double(N) * s.value();
}

double discrete_laplacian(const walk::StepDistribution& w, const fn::TestFunction& psi,
                          long N, PointI x) {
    return discrete_laplacian(
        w, [&psi](Vec2 u) { return psi.eval(u); }, N, x);
}

double DecompositionTrace::martingale(long k) const {
    Kahan s;
    for (long j = 0; j < k && j < long(dM.size()); ++j) s.add(dM[std::size_t(j)]);
    return s.value();
}

MultiTrace decompose_multi(const walk::StepDistribution& w, const fn::TestFunction& phi,
                           const std::vector<fn::TestFunction>& psis, long N, double t,
                           const disorder::CriticalCoupling& coupling,
                           const disorder::DisorderSpec& spec, double trunc_rel) {
    const long K = long(std::floor(double(N) * t));
    const std::size_t P = psis.size();
    const auto& kn = kern::active();

    PolymerField field = polymer::init_field(phi, N, w, coupling, spec, trunc_rel);

    MultiTrace mt;
    mt.traces.resize(P);
    mt.cross.assign(P, std::vector<std::vector<double>>(P));
    std::vector<Kahan> qv_acc(P);
    std::vector<std::vector<Kahan>> cross_acc(P, std::vector<Kahan>(P));
    for (std::size_t p = 0; p < P; ++p) {
        auto& tr = mt.traces[p];
        tr.N = N;
        tr.steps = K;
        tr.stream = field.stream;
        tr.Z.reserve(std::size_t(K) + 1);
        tr.Z.push_back(polymer::pair(field, psis[p]));
        tr.qv.reserve(std::size_t(K) + 1);
        tr.qv.push_back(0.0);
        for (std::size_t q = p + 1; q < P; ++q)
            mt.cross[p][q].push_back(0.0);
    }

    const double sigma = coupling.sigma();
    const double sig2_nn = coupling.sigma2 / (double(N) * double(N));
    std::vector<double> drow;
    std::vector<double> xi_scratch;

    for (long k = 0; k < K; ++k) {
        const Box dilated =
            field.W.box.dilated(w.min_dx(), w.max_dx(), w.min_dy(), w.max_dy());
        std::vector<Field2D> vals;
        vals.reserve(P);
        for (std::size_t p = 0; p < P; ++p) vals.push_back(build_psi_values(psis[p], N, dilated));

        // drift_k = (1/N) sum_y W_k(y) sum_s q_s (psi_N(y+s) - psi_N(y))
        for (std::size_t p = 0; p < P; ++p) {
            if (psis[p].is_constant()) {
                mt.traces[p].drift.push_back(0.0);
                continue;
            }
            const Field2D& pv = vals[p];
            Kahan acc;
            drow.assign(std::size_t(field.W.box.nx), 0.0);
            for (int y = field.W.box.y0; y <= field.W.box.y1(); ++y) {
                std::fill(drow.begin(), drow.end(), 0.0);
                const double* center = pv.row(y) + (field.W.box.x0 - pv.box.x0);
                for (const auto& st : w.steps()) {
                    const double* moved =
                        pv.row(y + st.dy) + (field.W.box.x0 + st.dx - pv.box.x0);
                    for (int i = 0; i < field.W.box.nx; ++i)
                        drow[std::size_t(i)] += st.p * (moved[i] - center[i]);
                }
                acc.add(kn.dot(field.W.row(y), drow.data(), std::size_t(field.W.box.nx)));
            }
            mt.traces[p].drift.push_back(acc.value() / double(N));
        }

        polymer::step(field);

        // dM_k = (1/N) sum_y Wbar_{k+1}(y) psi_N(y) xi_{k+1,y}
        const Field2D& wb = field.Wbar;
        xi_scratch.assign(std::size_t(wb.box.nx), 0.0);
        std::vector<Kahan> dm_acc(P);
        for (int y = wb.box.y0; y <= wb.box.y1(); ++y) {
            if (sigma > 0.0) {
                const std::uint64_t rk = disorder::row_key(field.stream, field.n, y);
                kn.apply_weights(xi_scratch.data(), wb.row(y), std::size_t(wb.box.nx),
                                 wb.box.x0, rk, sigma, -sigma);
            }
            for (std::size_t p = 0; p < P; ++p) {
                const double* pv = vals[p].row(y) + (wb.box.x0 - vals[p].box.x0);
                if (sigma > 0.0)
                    dm_acc[p].add(kn.dot(xi_scratch.data(), pv, std::size_t(wb.box.nx)));
                // QV and cross increments from Wbar^2.
                const double q = kn.dot_sqsq(wb.row(y), pv, std::size_t(wb.box.nx));
                qv_acc[p].add(q);
                for (std::size_t r = p + 1; r < P; ++r) {
                    const double* pvr = vals[r].row(y) + (wb.box.x0 - vals[r].box.x0);
                    const double* wrow = wb.row(y);
                    double cr = 0.0, cc = 0.0;
                    for (int i = 0; i < wb.box.nx; ++i) {
                        const double term = wrow[i] * wrow[i] * pv[i] * pvr[i];
                        double yv = term - cc;
                        double tv = cr + yv;
                        cc = (tv - cr) - yv;
                        cr = tv;
                    }
                    cross_acc[p][r].add(cr);
                }
            }
        }
        for (std::size_t p = 0; p < P; ++p) {
            auto& tr = mt.traces[p];
            tr.dM.push_back(dm_acc[p].value() / double(N));
            tr.Z.push_back(pairing_with_values(field.W, vals[p], N));
            tr.qv.push_back(sig2_nn * qv_acc[p].value());
            for (std::size_t r = p + 1; r < P; ++r)
                mt.cross[p][r].push_back(sig2_nn * cross_acc[p][r].value());
        }
    }
    return mt;
}

DecompositionTrace decompose(const walk::StepDistribution& w, const fn::TestFunction& phi,
                             const fn::TestFunction& psi, long N, double t,
                             const disorder::CriticalCoupling& coupling,
                             const disorder::DisorderSpec& spec, double trunc_rel) {
    auto mt = decompose_multi(w, phi, {psi}, N, t, coupling, spec, trunc_rel);
    return std::move(mt.traces[0]);
}

const std::vector<double>& qv_process(const DecompositionTrace& trace) { return trace.qv; }

void require_same_stream(const DecompositionTrace& a, const DecompositionTrace& b) {
    if (a.stream != b.stream || a.N != b.N || a.steps != b.steps)
        throw StreamMismatchError("cross variation requires traces from the same disorder path");
}

const std::vector<double>& cross_qv(const MultiTrace& mt, std::size_t i, std::size_t j) {
    if (i >= mt.traces.size() || j >= mt.traces.size())
        throw DomainError("cross_qv: trace index out of range");
    if (i == j) return mt.traces[i].qv;
    require_same_stream(mt.traces[i], mt.traces[j]);
    return i < j ? mt.cross[i][j] : mt.cross[j][i];
}

double mollified_density(const PolymerField& field, double eps, Vec2 z,
                         const MollifierSpec& mollifier) {
    if (!(eps > 0.0)) throw DomainError("mollified density: eps must be positive");
    const auto& kn = kern::active();
    const double rtN = std::sqrt(double(field.N));
    const Field2D& W = field.W;
    Kahan total;
    if (mollifier.kind == MollifierSpec::Kind::Heat) {
        const double reach = 8.0 * std::sqrt(eps) * rtN;
        const long zx = std::lround(z.x * rtN), zy = std::lround(z.y * rtN);
        const int x_lo = std::max(W.box.x0, int(zx - (long)std::ceil(reach)));
        const int x_hi = std::min(W.box.x1(), int(zx + (long)std::ceil(reach)));
        const int y_lo = std::max(W.box.y0, int(zy - (long)std::ceil(reach)));
        const int y_hi = std::min(W.box.y1(), int(zy + (long)std::ceil(reach)));
        if (x_hi < x_lo || y_hi < y_lo) return 0.0;
        std::vector<double> gx(std::size_t(x_hi - x_lo + 1));
        for (int x = x_lo; x <= x_hi; ++x) {
            const double d = x / rtN - z.x;
            gx[std::size_t(x - x_lo)] = std::exp(-d * d / (2.0 * eps));
        }
        for (int y = y_lo; y <= y_hi; ++y) {
            const double dy = y / rtN - z.y;
            const double gy = std::exp(-dy * dy / (2.0 * eps));
            total.add(gy * kn.dot(W.row(y) + (x_lo - W.box.x0), gx.data(), gx.size()));
        }
        return total.value() / (2.0 * kPi * eps * double(field.N));
    }
    // bump mollifier f_eps(x) = eps^{-1} f(x / sqrt(eps))
    const double r = mollifier.bump_radius;
    const double reach = r * std::sqrt(eps) * rtN;
    const long zx = std::lround(z.x * rtN), zy = std::lround(z.y * rtN);
    const int x_lo = std::max(W.box.x0, int(zx - (long)std::ceil(reach)) - 1);
    const int x_hi = std::min(W.box.x1(), int(zx + (long)std::ceil(reach)) + 1);
    const int y_lo = std::max(W.box.y0, int(zy - (long)std::ceil(reach)) - 1);
    const int y_hi = std::min(W.box.y1(), int(zy + (long)std::ceil(reach)) + 1);
    const double norm = 1.0 / (eps * r * r * fn::bump_unit_mass());
    for (int y = y_lo; y <= y_hi; ++y) {
        const double dy = y / rtN - z.y;
        Kahan row;
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x / rtN - z.x;
            const double rho2 = (dx * dx + dy * dy) / (eps * r * r);
            if (rho2 < 1.0) row.add(W.at(x, y) * std::exp(-1.0 / (1.0 - rho2)));
        }
        total.add(row.value());
    }
    return norm * total.value() / double(field.N);
}

namespace {

struct BlurPlan {
    double eps = 0.0;
    int m = 1;  // grid stride, lattice units
    int Q = 0;  // tap half-width, lattice units
    std::vector<double> taps;
};

BlurPlan make_blur_plan(double eps, long N, const GridSpec& grid) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("qv grid: eps must lie in (0,1)");
    const double rtN = std::sqrt(double(N));
    const double max_spacing = std::sqrt(eps) / 4.0;
    const double spacing = grid.spacing > 0.0 ? grid.spacing : max_spacing;
    if (spacing > max_spacing * (1.0 + 1e-12))
        throw GridTooCoarseError("z-grid spacing exceeds sqrt(eps)/4");
    if (eps * double(N) < 16.0 * (1.0 - 1e-12))
        throw GridTooCoarseError("eps below 16/N: lattice-aligned grid cannot resolve the mollifier");
    BlurPlan p;
    p.eps = eps;
    p.m = std::max(1, int(std::floor(spacing * rtN + 1e-9)));
    const double dil = grid.dilation > 0.0 ? grid.dilation : 5.0 * std::sqrt(eps);
    p.Q = int(std::ceil(dil * rtN));
    p.taps.resize(std::size_t(2 * p.Q + 1));
    for (int d = -p.Q; d <= p.Q; ++d) {
        const double u = d / rtN;
        p.taps[std::size_t(d + p.Q)] = std::exp(-u * u / (2.0 * eps));
    }
    return p;
}

// sum over the z-grid of (blurred W)^2 psi(z)^2 for one time slice.
double blur_step_sum(const Field2D& W, const BlurPlan& bp, const fn::TestFunction& psi,
                     long N, std::vector<double>& tbuf, std::vector<double>& pad,
                     std::vector<double>& drow) {
    const auto& kn = kern::active();
    const Box& box = W.box;
    const long m = bp.m, Q = bp.Q;
    const long iy0 = ceil_div(box.y0 - Q, m), iy1 = floor_div(box.y1() + Q, m);
    const long jx0 = ceil_div(box.x0 - Q, m), jx1 = floor_div(box.x1() + Q, m);
    const long nrows = iy1 - iy0 + 1, ncols = jx1 - jx0 + 1;
    if (nrows <= 0 || ncols <= 0) return 0.0;
    const std::size_t nx = std::size_t(box.nx);

    tbuf.assign(std::size_t(nrows) * nx, 0.0);
    for (long i = iy0; i <= iy1; ++i) {
        double* trow = tbuf.data() + std::size_t(i - iy0) * nx;
        const long ybase = i * m;
        for (long d = -Q; d <= Q; ++d) {
            const long y = ybase + d;
            if (y < box.y0 || y > box.y1()) continue;
            kn.axpy(trow, W.row(int(y)), bp.taps[std::size_t(d + Q)], nx);
        }
    }

    const double rtN = std::sqrt(double(N));
    std::vector<double> gx;
    double amp = 1.0;
    const bool constant = psi.is_constant();
    const bool separable = psi.separable();
    if (separable && !constant) {
        amp = psi.amplitude();
        gx.resize(std::size_t(ncols));
        for (long j = 0; j < ncols; ++j) gx[std::size_t(j)] = psi.axis_x(double((jx0 + j) * m) / rtN);
    }

    Kahan total;
    pad.assign(nx + std::size_t(4 * Q), 0.0);
    for (long i = iy0; i <= iy1; ++i) {
        const double* trow = tbuf.data() + std::size_t(i - iy0) * nx;
        drow.assign(std::size_t(ncols), 0.0);
        if (m == 1) {
            std::copy(trow, trow + nx, pad.begin() + std::size_t(2 * Q));
            // pad index a <-> lattice x = box.x0 - 2Q + a
            const double* in = pad.data() + (jx0 - box.x0 + Q);
            kn.correlate(drow.data(), in, bp.taps.data(), bp.taps.size(), std::size_t(ncols));
        } else {
            for (long j = 0; j < ncols; ++j) {
                const long pcenter = (jx0 + j) * m;
                double acc = 0.0;
                for (long q = 0; q <= 2 * Q; ++q) {
                    const long x = pcenter + q - Q;
                    if (x < box.x0 || x > box.x1()) continue;
                    acc += bp.taps[std::size_t(q)] * trow[std::size_t(x - box.x0)];
                }
                drow[std::size_t(j)] = acc;
            }
        }
        if (constant) {
            const double c = psi.constant_value();
            total.add(c * c * kn.sumsq(drow.data(), drow.size()));
        } else if (separable) {
            const double ag = amp * psi.axis_y(double(i * m) / rtN);
            total.add(ag * ag * kn.dot_sqsq(drow.data(), gx.data(), drow.size()));
        } else {
            Kahan rows;
            for (long j = 0; j < ncols; ++j) {
                const double pv =
                    psi.eval({double((jx0 + j) * m) / rtN, double(i * m) / rtN});
                const double dv = drow[std::size_t(j)];
                rows.add(dv * dv * pv * pv);
            }
            total.add(rows.value());
        }
    }
    return total.value();
}

}  // namespace

QvScanResult qv_scan(const walk::StepDistribution& w, const fn::TestFunction& phi, long N,
                     double t, const disorder::CriticalCoupling& coupling,
                     const disorder::DisorderSpec& spec, const std::vector<double>& eps_list,
                     const fn::TestFunction& psi, const GridSpec& grid, double trunc_rel) {
    const long K = long(std::floor(double(N) * t));
    std::vector<BlurPlan> plans;
    plans.reserve(eps_list.size());
    for (double e : eps_list) plans.push_back(make_blur_plan(e, N, grid));

    PolymerField field = polymer::init_field(phi, N, w, coupling, spec, trunc_rel);
    std::vector<Kahan> sums(plans.size());
    Kahan qv_exact;
    std::vector<double> tbuf, pad, drow;

    for (long k = 0; k < K; ++k) {
        for (std::size_t e = 0; e < plans.size(); ++e)
            sums[e].add(blur_step_sum(field.W, plans[e], psi, N, tbuf, pad, drow));
        polymer::step(field);
        qv_exact.add(polymer::pair_sq(field.Wbar, N, psi));
    }

    QvScanResult out;
    out.qv_exact = coupling.sigma2 / double(N) * qv_exact.value();
    out.eps = eps_list;
    out.qv_renorm.resize(plans.size());
    for (std::size_t e = 0; e < plans.size(); ++e) {
        const BlurPlan& bp = plans[e];
        const double h2 = double(bp.m) * double(bp.m) / double(N);
        const double rho_scale = 1.0 / (2.0 * kPi * bp.eps * double(N));
        out.qv_renorm[e] = 4.0 * kPi / (-std::log(bp.eps)) * h2 / double(N) * rho_scale *
                           rho_scale * sums[e].value();
    }
    return out;
}

double qv_renormalized(const walk::StepDistribution& w, const fn::TestFunction& phi, long N,
                       double t, const disorder::CriticalCoupling& coupling,
                       const disorder::DisorderSpec& spec, double eps,
                       const fn::TestFunction& psi, const GridSpec& grid, double trunc_rel) {
    return qv_scan(w, phi, N, t, coupling, spec, {eps}, psi, grid, trunc_rel).qv_renorm[0];
}

std::vector<PeakCell> peak_measure(const walk::StepDistribution& w,
                                   const fn::TestFunction& phi, long N,
                                   const disorder::CriticalCoupling& coupling,
                                   const disorder::DisorderSpec& spec,
                                   const PeakParams& params, double trunc_rel) {
    if (params.f.kind() != fn::TestFunction::Kind::Bump)
        throw DomainError("peak measure: mollifier must belong to the bump family");
    for (double l : params.lambdas)
        if (!(l > 0.0)) throw DomainError("peak measure: lambda must be positive");
    for (double e : params.epsilons)
        if (!(e > 0.0 && e < 0.5)) throw DomainError("peak measure: eps must lie in (0, 1/2)");

    const double rtN = std::sqrt(double(N));
    const double radius = params.f.support()[1] - (params.f.support()[0] + params.f.support()[1]) / 2.0;
    const long kmin = (long)std::ceil(double(N) * params.s);
    const long kmax = (long)std::floor(double(N) * params.t);

    struct EpsPlan {
        double eps;
        int m, Qf;
        std::vector<double> patch;  // (2Qf+1)^2 row-major mollifier values
    };
    std::vector<EpsPlan> plans;
    for (double e : params.epsilons) {
        if (e * double(N) < 16.0 * (1.0 - 1e-12))
            throw GridTooCoarseError("peak measure: eps below 16/N");
        EpsPlan p;
        p.eps = e;
        p.m = std::max(1, int(std::floor(std::sqrt(e) / 4.0 * rtN + 1e-9)));
        p.Qf = int(std::ceil(radius * std::sqrt(e) * rtN)) + 1;
        const int side = 2 * p.Qf + 1;
        p.patch.assign(std::size_t(side) * side, 0.0);
        const double norm = 1.0 / (e * radius * radius * fn::bump_unit_mass());
        for (int dy = -p.Qf; dy <= p.Qf; ++dy)
            for (int dx = -p.Qf; dx <= p.Qf; ++dx) {
                const double rho2 =
                    (dx * dx + dy * dy) / (e * radius * radius * double(N));
                if (rho2 < 1.0)
                    p.patch[std::size_t(dy + p.Qf) * side + std::size_t(dx + p.Qf)] =
                        norm * std::exp(-1.0 / (1.0 - rho2));
            }
        plans.push_back(std::move(p));
    }

    std::vector<std::vector<Kahan>> occ(plans.size(), std::vector<Kahan>(params.lambdas.size()));
    std::vector<std::vector<double>> area(plans.size(),
                                          std::vector<double>(params.lambdas.size(), 0.0));
    std::vector<std::vector<double>> band(plans.size(),
                                          std::vector<double>(params.lambdas.size(), 0.0));
    std::vector<double> sup(plans.size(), 0.0);

    PolymerField field = polymer::init_field(phi, N, w, coupling, spec, trunc_rel);
    const auto& kn = kern::active();

    for (long k = 0; k < kmax; ++k) {
        if (k >= kmin) {
            const Field2D& W = field.W;
            for (std::size_t e = 0; e < plans.size(); ++e) {
                const EpsPlan& p = plans[e];
                const int side = 2 * p.Qf + 1;
                const double logeps = std::log(1.0 / p.eps);
                const double cell = double(p.m) * double(p.m) / double(N) / double(N);
                // grid over region intersect dilated box
                const long jx0 = std::max(ceil_div(W.box.x0 - p.Qf, p.m),
                                          (long)std::ceil(params.region[0] * rtN / p.m));
                const long jx1 = std::min(floor_div(W.box.x1() + p.Qf, p.m),
                                          (long)std::floor(params.region[1] * rtN / p.m));
                const long iy0 = std::max(ceil_div(W.box.y0 - p.Qf, p.m),
                                          (long)std::ceil(params.region[2] * rtN / p.m));
                const long iy1 = std::min(floor_div(W.box.y1() + p.Qf, p.m),
                                          (long)std::floor(params.region[3] * rtN / p.m));
                for (long i = iy0; i <= iy1; ++i) {
                    for (long j = jx0; j <= jx1; ++j) {
                        const long cx = j * p.m, cy = i * p.m;
                        Kahan acc;
                        for (int dy = -p.Qf; dy <= p.Qf; ++dy) {
                            const long y = cy + dy;
                            if (y < W.box.y0 || y > W.box.y1()) continue;
                            const long x_lo = std::max<long>(W.box.x0, cx - p.Qf);
                            const long x_hi = std::min<long>(W.box.x1(), cx + p.Qf);
                            if (x_hi < x_lo) continue;
                            const double* prow = p.patch.data() +
                                                 std::size_t(dy + p.Qf) * side +
                                                 std::size_t(x_lo - cx + p.Qf);
                            acc.add(kn.dot(W.row(int(y)) + (x_lo - W.box.x0), prow,
                                           std::size_t(x_hi - x_lo + 1)));
                        }
                        const double rho = acc.value() / double(N);
                        sup[e] = std::max(sup[e], rho / (1.0 + logeps));
                        for (std::size_t l = 0; l < params.lambdas.size(); ++l) {
                            const double lam = params.lambdas[l];
                            if (rho >= lam * logeps) {
                                occ[e][l].add(rho * cell);
                                area[e][l] += cell;
                            }
                            if (rho >= logeps / lam && rho < lam * logeps) band[e][l] += cell;
                        }
                    }
                }
            }
        }
        polymer::step(field);
    }

    std::vector<PeakCell> cells;
    for (std::size_t e = 0; e < plans.size(); ++e)
        for (std::size_t l = 0; l < params.lambdas.size(); ++l) {
            PeakCell c;
            c.lambda = params.lambdas[l];
            c.eps = plans[e].eps;
            c.occupation = occ[e][l].value();
            c.area = area[e][l];
            c.band_area = band[e][l];
            c.logscaled_sup = sup[e];
            cells.push_back(c);
        }
    return cells;
}

}  // namespace polylab::semimart
