#include "polylab/oracle.hpp"

#include <cmath>

namespace polylab::oracle {

namespace {

// Per-step site lists: positions with Wbar_k > 0, in deterministic order.
std::vector<std::vector<PointI>> site_lists(const TinyInstance& inst) {
    std::vector<std::vector<PointI>> sites;
    Field2D cur = inst.phi0;
    for (int k = 1; k <= inst.steps; ++k) {
        Field2D next = walk::convolve_step(inst.walk, cur);
        std::vector<PointI> s;
        for (int y = next.box.y0; y <= next.box.y1(); ++y) {
            const double* row = next.row(y);
            for (int i = 0; i < next.box.nx; ++i)
                if (row[i] > 0.0) s.push_back({next.box.x0 + i, y});
        }
        sites.push_back(std::move(s));
        cur = std::move(next);
        // expectation path: weights average to 1, so support evolves as-is
    }
    return sites;
}

struct PathOutputs {
    double Z = 0.0;
    double qv = 0.0;  // <M>_n
    double M = 0.0;   // sum dM_k
};

// Evolve one explicit sign pattern; bits are consumed per step in site order.
PathOutputs evolve_pattern(const TinyInstance& inst,
                           const std::vector<std::vector<PointI>>& sites,
                           std::uint32_t pattern) {
    const double rtN = std::sqrt(double(inst.N));
    Field2D w = inst.phi0;
    Kahan qv, msum;
    int bit = 0;
    for (int k = 1; k <= inst.steps; ++k) {
        Field2D wbar = walk::convolve_step(inst.walk, w);
        Field2D wn = wbar;
        Kahan dm;
        Kahan q;
        for (const auto& p : sites[std::size_t(k - 1)]) {
            const bool minus = (pattern >> bit) & 1u;
            ++bit;
            const double xi = minus ? -inst.sigma : inst.sigma;
            const double pv = inst.psi.eval({p.x / rtN, p.y / rtN});
            const double wb = wbar.at(p.x, p.y);
            wn.at(p.x, p.y) = wb * (1.0 + xi);
            dm.add(wb * pv * xi);
            q.add(wb * wb * pv * pv);
        }
        qv.add(q.value());
        msum.add(dm.value() / double(inst.N));
        w = std::move(wn);
    }
    PathOutputs out;
    out.M = msum.value();
    out.qv = inst.sigma * inst.sigma / (double(inst.N) * double(inst.N)) * qv.value();
    Kahan z;
    for (int y = w.box.y0; y <= w.box.y1(); ++y) {
        const double* row = w.row(y);
        for (int i = 0; i < w.box.nx; ++i)
            z.add(row[i] * inst.psi.eval({(w.box.x0 + i) / rtN, y / rtN}));
    }
    out.Z = z.value() / double(inst.N);
    return out;
}

int total_sites(const std::vector<std::vector<PointI>>& sites) {
    int s = 0;
    for (const auto& v : sites) s += int(v.size());
    return s;
}

}  // namespace

int count_sites(const TinyInstance& inst) { return total_sites(site_lists(inst)); }

ExactMoments exact_moments(const TinyInstance& inst) {
    const auto sites = site_lists(inst);
    const int S = total_sites(sites);
    if (S > 20) throw ResourceError("enumeration oracle: more than 20 space-time sites");
    const std::uint32_t npat = 1u << S;

    ExactMoments out;
    {
        const double rtN = std::sqrt(double(inst.N));
        Kahan z0;
        for (int y = inst.phi0.box.y0; y <= inst.phi0.box.y1(); ++y) {
            const double* row = inst.phi0.row(y);
            for (int i = 0; i < inst.phi0.box.nx; ++i)
                z0.add(row[i] * inst.psi.eval({(inst.phi0.box.x0 + i) / rtN, y / rtN}));
        }
        out.EZ0 = z0.value() / double(inst.N);
    }

    Kahan ez, ez2, eqv, em2;
    for (std::uint32_t pat = 0; pat < npat; ++pat) {
        const PathOutputs po = evolve_pattern(inst, sites, pat);
        ez.add(po.Z);
        ez2.add(po.Z * po.Z);
        eqv.add(po.qv);
        em2.add(po.M * po.M);
    }
    const double inv = 1.0 / double(npat);
    out.EZ = ez.value() * inv;
    out.EZ2 = ez2.value() * inv;
    out.VarZ = out.EZ2 - out.EZ * out.EZ;
    out.EQV = eqv.value() * inv;
    out.EM2 = em2.value() * inv;
    return out;
}

ConditionalCheck conditional_checks(const TinyInstance& inst) {
    const auto sites = site_lists(inst);
    const int S = total_sites(sites);
    if (S > 20) throw ResourceError("enumeration oracle: more than 20 space-time sites");

    ConditionalCheck out;
    const double rtN = std::sqrt(double(inst.N));
    const double sig2_nn = inst.sigma * inst.sigma / (double(inst.N) * double(inst.N));

    for (int k = 1; k <= inst.steps; ++k) {
        int prefix_bits = 0;
        for (int j = 0; j < k - 1; ++j) prefix_bits += int(sites[std::size_t(j)].size());
        const int step_bits = int(sites[std::size_t(k - 1)].size());
        for (std::uint32_t pre = 0; pre < (1u << prefix_bits); ++pre) {
            // evolve the prefix to get Wbar_k
            Field2D w = inst.phi0;
            int bit = 0;
            Field2D wbar = walk::convolve_step(inst.walk, w);
            for (int j = 1; j < k; ++j) {
                Field2D wn = wbar;
                for (const auto& p : sites[std::size_t(j - 1)]) {
                    const bool minus = (pre >> bit) & 1u;
                    ++bit;
                    wn.at(p.x, p.y) *= minus ? 1.0 - inst.sigma : 1.0 + inst.sigma;
                }
                w = std::move(wn);
                wbar = walk::convolve_step(inst.walk, w);
            }
            // conditional moments of dM_k over the step-k signs
            Kahan cond_mean, cond_sq, predicted;
            for (const auto& p : sites[std::size_t(k - 1)]) {
                const double pv = inst.psi.eval({p.x / rtN, p.y / rtN});
                const double wb = wbar.at(p.x, p.y);
                predicted.add(wb * wb * pv * pv);
            }
            for (std::uint32_t suf = 0; suf < (1u << step_bits); ++suf) {
                Kahan dm;
                int sbit = 0;
                for (const auto& p : sites[std::size_t(k - 1)]) {
                    const bool minus = (suf >> sbit) & 1u;
                    ++sbit;
                    const double xi = minus ? -inst.sigma : inst.sigma;
                    const double pv = inst.psi.eval({p.x / rtN, p.y / rtN});
                    dm.add(wbar.at(p.x, p.y) * pv * xi);
                }
                const double v = dm.value() / double(inst.N);
                cond_mean.add(v);
                cond_sq.add(v * v);
            }
            const double inv = 1.0 / double(1u << step_bits);
            out.max_mean = std::max(out.max_mean, std::abs(cond_mean.value() * inv));
            out.max_var_gap =
                std::max(out.max_var_gap,
                         std::abs(cond_sq.value() * inv - sig2_nn * predicted.value()));
        }
    }
    return out;
}

}  // namespace polylab::oracle
