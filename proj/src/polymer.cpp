#include "polylab/polymer.hpp"

#include <cmath>

#include "polylab/kernels.hpp"

namespace polylab::polymer {

namespace {

// Tight bounding box of entries >= thr; empty box if all below.
Box tight_box(const Field2D& f, double thr) {
    int ylo = f.box.y1() + 1, yhi = f.box.y0 - 1;
    int xlo = f.box.x1() + 1, xhi = f.box.x0 - 1;
    for (int y = f.box.y0; y <= f.box.y1(); ++y) {
        const double* row = f.row(y);
        int lo = -1, hi = -1;
        for (int i = 0; i < f.box.nx; ++i) {
            if (row[i] >= thr) {
                if (lo < 0) lo = i;
                hi = i;
            }
        }
        if (lo >= 0) {
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
            xlo = std::min(xlo, f.box.x0 + lo);
            xhi = std::max(xhi, f.box.x0 + hi);
        }
    }
    if (yhi < ylo) return Box{0, 0, 0, 0};
    return Box{xlo, ylo, xhi - xlo + 1, yhi - ylo + 1};
}

Field2D cropped(Field2D&& f, const Box& b) {
    if (b.x0 == f.box.x0 && b.y0 == f.box.y0 && b.nx == f.box.nx && b.ny == f.box.ny)
        return std::move(f);
    Field2D out(b);
    for (int y = b.y0; y <= b.y1(); ++y) {
        const double* src = f.row(y) + (b.x0 - f.box.x0);
        double* dst = out.row(y);
        for (int i = 0; i < b.nx; ++i) dst[i] = src[i];
    }
    return out;
}

}  // namespace

Field2D lattice_initial(const fn::TestFunction& phi, long N) {
    const auto sup = phi.support();
    const double rtN = std::sqrt(double(N));
    const long x0 = (long)std::ceil(sup[0] * rtN), x1 = (long)std::floor(sup[1] * rtN);
    const long y0 = (long)std::ceil(sup[2] * rtN), y1 = (long)std::floor(sup[3] * rtN);
    if (x1 < x0 || y1 < y0) throw EmptySupportError("phi has no lattice point in its window");
    Field2D f(Box{int(x0), int(y0), int(x1 - x0 + 1), int(y1 - y0 + 1)});
    bool any = false;
    for (long y = y0; y <= y1; ++y) {
        double* row = f.row(int(y));
        for (long x = x0; x <= x1; ++x) {
            const double val = phi.eval({double(x) / rtN, double(y) / rtN});
            if (val < 0.0) throw DomainError("phi must be nonnegative");
            row[x - x0] = val;
            any |= (val > 0.0);
        }
    }
    if (!any) throw EmptySupportError("phi vanishes at every lattice point of its window");
    const Box tight = tight_box(f, std::nextafter(0.0, 1.0));
    return cropped(std::move(f), tight);
}

PolymerField init_field(const fn::TestFunction& phi, long N,
                        const walk::StepDistribution& walk,
                        const disorder::CriticalCoupling& coupling,
                        const disorder::DisorderSpec& spec, double trunc_rel) {
    PolymerField f{walk, coupling, spec, N, 0, Field2D{}, Field2D{}, trunc_rel, 0};
    f.W = lattice_initial(phi, N);
    f.Wbar = f.W;
    f.stream = disorder::stream_base(spec.seed, spec.replica);
    return f;
}

void step(PolymerField& field) {
    const auto& k = kern::active();
    Field2D wbar = walk::convolve_step(field.walk, field.W);

    if (field.trunc_rel > 0.0) {
        const double mx = k.max(wbar.v.data(), wbar.v.size());
        if (mx > 0.0) wbar = cropped(std::move(wbar), tight_box(wbar, mx * field.trunc_rel));
    }
    const double mx = k.max(wbar.v.data(), wbar.v.size());
    if (!(mx < 5e299)) throw OverflowError("polymer step: field entry exceeds 1e300");

    field.n += 1;
    Field2D w(wbar.box);
    if (field.coupling.sigma2 == 0.0) {
        w = wbar;
    } else {
        const double wp = field.coupling.weight_plus();
        const double wm = field.coupling.weight_minus();
        for (int y = wbar.box.y0; y <= wbar.box.y1(); ++y) {
            const std::uint64_t rk = disorder::row_key(field.stream, field.n, y);
            k.apply_weights(w.row(y), wbar.row(y), std::size_t(wbar.box.nx), wbar.box.x0, rk,
                            wp, wm);
        }
    }
    field.Wbar = std::move(wbar);
    field.W = std::move(w);
}

double weighted_pairing(const Field2D& f, long N, const fn::TestFunction& psi) {
    const auto& k = kern::active();
    const double rtN = std::sqrt(double(N));
    Kahan total;
    if (psi.is_constant()) {
        Kahan rows;
        for (int y = f.box.y0; y <= f.box.y1(); ++y)
            rows.add(k.sum(f.row(y), std::size_t(f.box.nx)));
        return psi.constant_value() * rows.value() / double(N);
    }
    if (psi.separable()) {
        std::vector<double> gx(std::size_t(f.box.nx));
        for (int i = 0; i < f.box.nx; ++i) gx[std::size_t(i)] = psi.axis_x((f.box.x0 + i) / rtN);
        const double amp = psi.amplitude();
        for (int y = f.box.y0; y <= f.box.y1(); ++y) {
            const double gy = psi.axis_y(y / rtN);
            total.add(amp * gy * k.dot(f.row(y), gx.data(), std::size_t(f.box.nx)));
        }
        return total.value() / double(N);
    }
    std::vector<double> vals(std::size_t(f.box.nx));
    for (int y = f.box.y0; y <= f.box.y1(); ++y) {
        for (int i = 0; i < f.box.nx; ++i)
            vals[std::size_t(i)] = psi.eval({(f.box.x0 + i) / rtN, y / rtN});
        total.add(k.dot(f.row(y), vals.data(), std::size_t(f.box.nx)));
    }
    return total.value() / double(N);
}

double pair_sq(const Field2D& f, long N, const fn::TestFunction& psi) {
    const auto& k = kern::active();
    const double rtN = std::sqrt(double(N));
    Kahan total;
    if (psi.is_constant()) {
        const double c2 = psi.constant_value() * psi.constant_value();
        for (int y = f.box.y0; y <= f.box.y1(); ++y)
            total.add(k.sumsq(f.row(y), std::size_t(f.box.nx)));
        return c2 * total.value() / double(N);
    }
    if (psi.separable()) {
        std::vector<double> gx(std::size_t(f.box.nx));
        for (int i = 0; i < f.box.nx; ++i) gx[std::size_t(i)] = psi.axis_x((f.box.x0 + i) / rtN);
        const double amp = psi.amplitude();
        for (int y = f.box.y0; y <= f.box.y1(); ++y) {
            const double ag = amp * psi.axis_y(y / rtN);
            total.add(ag * ag * k.dot_sqsq(f.row(y), gx.data(), std::size_t(f.box.nx)));
        }
        return total.value() / double(N);
    }
    std::vector<double> vals(std::size_t(f.box.nx));
    for (int y = f.box.y0; y <= f.box.y1(); ++y) {
        for (int i = 0; i < f.box.nx; ++i)
            vals[std::size_t(i)] = psi.eval({(f.box.x0 + i) / rtN, y / rtN});
        total.add(k.dot_sqsq(f.row(y), vals.data(), std::size_t(f.box.nx)));
    }
    return total.value() / double(N);
}

double pair(const PolymerField& field, const fn::TestFunction& psi) {
    return weighted_pairing(field.W, field.N, psi);
}

double pair_bar(const PolymerField& field, const fn::TestFunction& psi) {
    return weighted_pairing(field.Wbar, field.N, psi);
}

std::vector<std::pair<Vec2, double>> density_snapshot(const PolymerField& field) {
    std::vector<std::pair<Vec2, double>> atoms;
    atoms.reserve(field.W.box.size());
    const double rtN = std::sqrt(double(field.N));
    for (int y = field.W.box.y0; y <= field.W.box.y1(); ++y) {
        const double* row = field.W.row(y);
        for (int i = 0; i < field.W.box.nx; ++i) {
            atoms.push_back({Vec2{(field.W.box.x0 + i) / rtN, y / rtN}, row[i] / double(field.N)});
        }
    }
    return atoms;
}

}  // namespace polylab::polymer
