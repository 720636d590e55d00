#include "qgp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace qgp {

namespace {

constexpr double kPi = 3.14159265358979323846;

int zero_mode_count(const MetricGraph& g) {
    int z = 0;
    for (const auto& comp : components(g))
        if (!comp.graph.has_dirichlet()) ++z;
    return z;
}

}  // namespace

namespace {

void assemble_secular_into(const MetricGraph& g, double k, Eigen::MatrixXd& A) {
    if (!(k > 0)) throw std::invalid_argument("assemble_secular: k must be positive");
    const int M = g.num_edges();
    A.setZero(2 * M, 2 * M);
    // value at slot: (m,0): A_m ; (m,1): A_m cos(kl) + B_m sin(kl)
    // inward derivative / k: (m,0): B_m ; (m,1): A_m sin(kl) - B_m cos(kl)
    auto add_value = [&](int row, int s, double w) {
        int m = MetricGraph::slot_edge(s);
        if (MetricGraph::slot_end(s) == 0) {
            A(row, 2 * m) += w;
        } else {
            double kl = k * g.edges[m].length;
            A(row, 2 * m) += w * std::cos(kl);
            A(row, 2 * m + 1) += w * std::sin(kl);
        }
    };
    auto add_inward = [&](int row, int s, double w) {
        int m = MetricGraph::slot_edge(s);
        if (MetricGraph::slot_end(s) == 0) {
            A(row, 2 * m + 1) += w;
        } else {
            double kl = k * g.edges[m].length;
            A(row, 2 * m) += w * std::sin(kl);
            A(row, 2 * m + 1) -= w * std::cos(kl);
        }
    };
    int row = 0;
    for (int v = 0; v < g.num_vertices(); ++v) {
        const auto& cls = g.vertices[v];
        if (g.dirichlet[v]) {
            for (int s : cls) add_value(row++, s, 1.0);
        } else {
            for (std::size_t i = 1; i < cls.size(); ++i) {
                add_value(row, cls[0], 1.0);
                add_value(row, cls[i], -1.0);
                ++row;
            }
            for (int s : cls) add_inward(row, s, 1.0);
            ++row;
        }
    }
    if (row != 2 * M) throw std::logic_error("assemble_secular: row count mismatch");
}

}  // namespace

Eigen::MatrixXd assemble_secular(const MetricGraph& g, double k) {
    Eigen::MatrixXd A;
    assemble_secular_into(g, k, A);
    return A;
}

// ---------------------------------------------------------------------------
// scanning machinery

namespace {

struct DetEval {
    double sign;    // -1, 0, +1
    double logabs;  // log |det|, -inf if exactly singular
};

// Partial-pivot elimination, in place and column-major friendly.
DetEval det_eval_inplace(Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    double* a = A.data();
    double sign = 1.0, logabs = 0.0;
    for (int c = 0; c < n; ++c) {
        double* colc = a + static_cast<std::ptrdiff_t>(c) * n;
        int p = c;
        double best = std::abs(colc[c]);
        for (int r = c + 1; r < n; ++r)
            if (std::abs(colc[r]) > best) {
                best = std::abs(colc[r]);
                p = r;
            }
        if (best == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
        if (p != c) {
            for (int j = c; j < n; ++j) std::swap(a[static_cast<std::ptrdiff_t>(j) * n + p],
                                                  a[static_cast<std::ptrdiff_t>(j) * n + c]);
            sign = -sign;
        }
        double piv = colc[c];
        sign *= (piv > 0 ? 1.0 : -1.0);
        logabs += std::log(std::abs(piv));
        double inv = 1.0 / piv;
        for (int r = c + 1; r < n; ++r) colc[r] *= inv;  // multipliers
        for (int j = c + 1; j < n; ++j) {
            double* colj = a + static_cast<std::ptrdiff_t>(j) * n;
            double head = colj[c];
            if (head == 0.0) continue;
            for (int r = c + 1; r < n; ++r) colj[r] -= head * colc[r];
        }
    }
    return {sign, logabs};
}


struct RootInfo {
    double k;
    int mult;
    double err;
};

// Brent-style bracketed root refinement on the signed determinant.
double refine_sign_change(const MetricGraph& g, Eigen::MatrixXd& W, double a, double b, DetEval fa, DetEval fb,
                          double tol) {
    auto deval = [&](double k) {
        assemble_secular_into(g, k, W);
        return det_eval_inplace(W);
    };
    auto fval = [&](const DetEval& d) { return d.sign * std::exp(std::min(d.logabs, 300.0)); };
    double fa_v = fval(fa), fb_v = fval(fb);
    for (int it = 0; it < 200; ++it) {
        if (std::abs(b - a) <= tol) break;
        double m = 0.5 * (a + b);
        // secant proposal when well scaled
        double s = m;
        if (fa_v != fb_v) {
            s = b - fb_v * (b - a) / (fb_v - fa_v);
            if (!(s > std::min(a, b) && s < std::max(a, b))) s = m;
        }
        // alternate bisection to guarantee progress
        if (it % 2) s = m;
        DetEval fs = deval(s);
        double fs_v = fval(fs);
        if (fs.sign == 0.0) return s;
        if ((fs.sign > 0) == (fa.sign > 0)) {
            a = s;
            fa = fs;
            fa_v = fs_v;
        } else {
            b = s;
            fb = fs;
            fb_v = fs_v;
        }
    }
    return 0.5 * (a + b);
}

// Golden-section minimisation of log|det| for even-multiplicity dips.
double refine_dip(const MetricGraph& g, Eigen::MatrixXd& W, double a, double b, double tol) {
    auto lval = [&](double k) {
        assemble_secular_into(g, k, W);
        return det_eval_inplace(W).logabs;
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = lval(x1);
    double f2 = lval(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = lval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = lval(x2);
        }
    }
    return 0.5 * (a + b);
}

struct SecularScanResult {
    std::vector<RootInfo> roots;
    bool window_exhausted = false;
};

// Scan for positive roots until `needed` eigenvalues (with multiplicity) are
// found or k exceeds k_max.
SecularScanResult secular_scan(const MetricGraph& g, int needed, double step, double k_max,
                               const SpectralOptions& opts) {
    SecularScanResult out;
    const double L = g.total_length();
    const double k_start = 0.4 * kPi / (2.0 * L);  // below the Nicaise bound
    Eigen::MatrixXd W;
    auto deval = [&](double kk) {
        assemble_secular_into(g, kk, W);
        return det_eval_inplace(W);
    };
    double prev_k = k_start;
    DetEval prev = deval(prev_k);
    DetEval prev2{0.0, std::numeric_limits<double>::infinity()};
    double prev2_k = 0.0;
    bool have_prev2 = false;
    int found = 0;

    struct KernelInfo {
        bool is_root;  // sigma_min below the acceptance threshold
        int mult;      // singular values below the multiplicity threshold
    };
    auto kernel_info = [&](double kk) {
        Eigen::MatrixXd A = assemble_secular(g, kk);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        const auto& sv = svd.singularValues();
        double smax = std::max(sv(0), 1.0);
        int mult = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) < opts.tol_mult_scale * smax) ++mult;
        bool is_root = sv(sv.size() - 1) < opts.tol_root_scale * smax;
        return KernelInfo{is_root, mult};
    };
    auto push_root = [&](double root, int mult) {
        for (const auto& r : out.roots)
            if (std::abs(r.k - root) < 1e-9 * std::max(1.0, root)) return false;
        double err = 2.0 * root * opts.root_tol * std::max(1.0, root);
        out.roots.push_back({root, mult, err});
        found += mult;
        return true;
    };

    double k = k_start;
    while (found < needed) {
        k += step;
        if (k > k_max) {
            out.window_exhausted = true;
            return out;
        }
        DetEval cur = deval(k);
        auto mult_of = [&](double root) {
            if (!opts.multiplicities) return 1;
            return std::max(kernel_info(root).mult, 1);
        };
        if (cur.sign != 0.0 && prev.sign != 0.0 && cur.sign != prev.sign) {
            double root = refine_sign_change(g, W, prev_k, k, prev, cur, opts.root_tol * std::max(1.0, k));
            push_root(root, mult_of(root));
        } else if (cur.sign == 0.0) {
            push_root(k, mult_of(k));
        } else if (have_prev2 && prev.logabs <= prev2.logabs && prev.logabs <= cur.logabs) {
            // |det| dips without a sign change: an even number of roots
            // (counting multiplicity) may hide inside [prev2_k, k]
            double cand = refine_dip(g, W, prev2_k, k, opts.root_tol * std::max(1.0, k));
            KernelInfo ki = kernel_info(cand);
            if (ki.is_root && push_root(cand, std::max(ki.mult, 1)) && ki.mult % 2 == 1 &&
                prev2.sign != 0.0 && cur.sign != 0.0 && prev2.sign == cur.sign && prev.sign == prev2.sign) {
                // an odd root between same-sign endpoints has a partner: the
                // determinant changes sign across `cand`, so probe both flanks
                double eps = std::max(64.0 * opts.root_tol * std::max(1.0, cand), 1e-7 * step);
                DetEval dl = deval(cand - eps);
                DetEval dr = deval(cand + eps);
                double partner = std::numeric_limits<double>::quiet_NaN();
                if (dl.sign != 0.0 && dl.sign != prev2.sign && cand - eps > prev2_k)
                    partner = refine_sign_change(g, W, prev2_k, cand - eps, prev2, dl,
                                                 opts.root_tol * std::max(1.0, k));
                else if (dr.sign != 0.0 && dr.sign != cur.sign && cand + eps < k)
                    partner = refine_sign_change(g, W, cand + eps, k, dr, cur,
                                                 opts.root_tol * std::max(1.0, k));
                if (std::isfinite(partner)) push_root(partner, mult_of(partner));
            }
        }
        prev2 = prev;
        prev2_k = prev_k;
        have_prev2 = true;
        prev = cur;
        prev_k = k;
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const RootInfo& a, const RootInfo& b) { return a.k < b.k; });
    return out;
}

SpectralResult secular_eigenvalues(const MetricGraph& g, int count, const SpectralOptions& opts) {
    SpectralResult res;
    res.method = "secular";
    const int z = zero_mode_count(g);
    for (int i = 0; i < std::min(z, count); ++i) {
        res.values.push_back(0.0);
        res.kernel_dim.push_back(z);
        res.error.push_back(0.0);
    }
    int needed = count - static_cast<int>(res.values.size());
    if (needed <= 0) return res;
    const double L = g.total_length();
    double step = kPi / (opts.scan_points_per_gap * L);
    // Weyl: about |G|k/pi eigenvalues below k; leave generous headroom.
    double k_max = kPi * (count + g.num_vertices() + 4) / L * 2.0 + 10.0 * step;
    SecularScanResult scan;
    for (int attempt = 0; attempt <= opts.max_rescans; ++attempt) {
        scan = secular_scan(g, needed, step, k_max, opts);
        if (!scan.window_exhausted) break;
        step *= 0.5;
        if (attempt == opts.max_rescans)
            throw std::runtime_error("secular scan window exhausted before requested root count");
    }
    for (const auto& r : scan.roots) {
        for (int i = 0; i < r.mult && static_cast<int>(res.values.size()) < count; ++i) {
            res.values.push_back(r.k * r.k);
            res.kernel_dim.push_back(r.mult);
            res.error.push_back(std::max(r.err, 1e-13 * (1.0 + r.k * r.k)));
        }
        if (static_cast<int>(res.values.size()) >= count) break;
    }
    return res;
}

// ---------------------------------------------------------------------------
// FEM path

struct FemMesh {
    // unknown indices; -1 for Dirichlet vertices
    std::vector<int> vertex_dof;
    int n_dof = 0;
};

Eigen::VectorXd fem_eigenvalues(const MetricGraph& g, int count, double h, int max_unknowns) {
    std::vector<int> vertex_dof(g.num_vertices(), -1);
    int n = 0;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (!g.dirichlet[v]) vertex_dof[v] = n++;
    std::vector<int> segs(g.num_edges());
    for (int m = 0; m < g.num_edges(); ++m) {
        segs[m] = std::max(4, static_cast<int>(std::ceil(g.edges[m].length / h)));
        n += segs[m] - 1;
    }
    if (n > max_unknowns) throw std::runtime_error("fem mesh too large");
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd Mm = Eigen::MatrixXd::Zero(n, n);
    int next_interior = 0;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (!g.dirichlet[v]) next_interior = std::max(next_interior, vertex_dof[v] + 1);
    for (int m = 0; m < g.num_edges(); ++m) {
        int s = segs[m];
        double hl = g.edges[m].length / s;
        // node DOFs along this edge: [v0, i1..i_{s-1}, v1]
        std::vector<int> dof(s + 1);
        dof[0] = vertex_dof[g.vertex_of_slot(MetricGraph::slot(m, 0))];
        dof[s] = vertex_dof[g.vertex_of_slot(MetricGraph::slot(m, 1))];
        for (int i = 1; i < s; ++i) dof[i] = next_interior++;
        for (int i = 0; i < s; ++i) {
            int a = dof[i], b = dof[i + 1];
            double kd = 1.0 / hl, md = hl / 3.0, mo = hl / 6.0;
            if (a >= 0) {
                K(a, a) += kd;
                Mm(a, a) += md;
            }
            if (b >= 0) {
                K(b, b) += kd;
                Mm(b, b) += md;
            }
            if (a >= 0 && b >= 0) {
                K(a, b) -= kd;
                K(b, a) -= kd;
                Mm(a, b) += mo;
                Mm(b, a) += mo;
            }
        }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Mm);
    if (es.info() != Eigen::Success) throw std::runtime_error("fem eigensolver failed");
    Eigen::VectorXd vals = es.eigenvalues().head(std::min<int>(count, n));
    if (vals.size() < count) throw std::runtime_error("fem mesh too coarse for requested count");
    return vals;
}

SpectralResult fem_extrapolated(const MetricGraph& g, int count, const SpectralOptions& opts) {
    double h = opts.fem_h > 0 ? opts.fem_h : g.total_length() / 200.0;
    Eigen::VectorXd a = fem_eigenvalues(g, count, h, opts.fem_max_unknowns);
    Eigen::VectorXd b = fem_eigenvalues(g, count, h / 2.0, opts.fem_max_unknowns);
    SpectralResult res;
    res.method = "fem-extrapolated";
    for (int i = 0; i < count; ++i) {
        double richardson = (4.0 * b(i) - a(i)) / 3.0;
        res.values.push_back(std::max(richardson, 0.0));
        res.kernel_dim.push_back(1);
        res.error.push_back(std::abs(b(i) - a(i)) / 3.0 + 1e-12 * (1.0 + std::abs(richardson)));
    }
    // clip tiny negative zero-modes
    for (auto& v : res.values)
        if (std::abs(v) < 1e-10) v = std::max(v, 0.0);
    return res;
}

}  // namespace

SpectralResult eigenvalues(const MetricGraph& g, int count, EigMethod method, const SpectralOptions& opts) {
    if (g.num_edges() == 0) throw std::invalid_argument("eigenvalues: empty graph");
    if (count < 1) throw std::invalid_argument("eigenvalues: count must be >= 1");
    switch (method) {
        case EigMethod::secular:
            return secular_eigenvalues(g, count, opts);
        case EigMethod::fem:
            return fem_extrapolated(g, count, opts);
        case EigMethod::cross_check: {
            SpectralOptions o = opts;
            for (int attempt = 0;; ++attempt) {
                SpectralResult s = secular_eigenvalues(g, count, o);
                SpectralResult f = fem_extrapolated(g, count, o);
                bool ok = true;
                for (int i = 0; i < count; ++i) {
                    double tol = 10.0 * s.error[i] + 4.0 * f.error[i] + 1e-9 * std::max(1.0, s.values[i]);
                    if (std::abs(s.values[i] - f.values[i]) > tol) ok = false;
                }
                if (ok) {
                    SpectralResult res = s;
                    res.method = "cross-check";
                    for (int i = 0; i < count; ++i) res.error[i] += f.error[i];
                    return res;
                }
                if (attempt >= o.max_rescans)
                    throw std::runtime_error("secular and fem eigenvalues disagree beyond tolerance");
                o.scan_points_per_gap *= 2.0;  // suspect missed roots; rescan finer
            }
        }
    }
    throw std::logic_error("unreachable");
}

double mu2(const MetricGraph& g, const SpectralOptions& opts) {
    if (!is_connected(g)) throw std::invalid_argument("mu2: graph must be connected");
    SpectralOptions o = opts;
    o.multiplicities = false;  // only the value of the first nonzero root is needed
    if (!g.has_dirichlet()) return eigenvalues(g, 2, EigMethod::secular, o).values[1];
    MetricGraph h = g;
    std::fill(h.dirichlet.begin(), h.dirichlet.end(), 0);
    h.validate();
    return eigenvalues(h, 2, EigMethod::secular, o).values[1];
}

double lambda1(const MetricGraph& g, const SpectralOptions& opts) {
    if (!g.has_dirichlet()) throw std::invalid_argument("lambda1: Dirichlet set must be non-empty");
    SpectralOptions o = opts;
    o.multiplicities = false;
    return eigenvalues(g, 1, EigMethod::secular, o).values[0];
}

// ---------------------------------------------------------------------------
// eigenfunctions

double wave_value_at_slot(const MetricGraph& g, const EdgeWave& w, int slot) {
    int m = MetricGraph::slot_edge(slot);
    double A = w.coeff[m][0], B = w.coeff[m][1];
    double l = g.edges[m].length;
    if (w.k == 0.0) return MetricGraph::slot_end(slot) == 0 ? A : A + B * l;
    if (MetricGraph::slot_end(slot) == 0) return A;
    return A * std::cos(w.k * l) + B * std::sin(w.k * l);
}

double wave_inward_derivative(const MetricGraph& g, const EdgeWave& w, int slot) {
    int m = MetricGraph::slot_edge(slot);
    double A = w.coeff[m][0], B = w.coeff[m][1];
    double l = g.edges[m].length;
    if (w.k == 0.0) return MetricGraph::slot_end(slot) == 0 ? B : -B;
    if (MetricGraph::slot_end(slot) == 0) return w.k * B;
    return w.k * (A * std::sin(w.k * l) - B * std::cos(w.k * l));
}

double wave_inner_product(const MetricGraph& g, const EdgeWave& a, const EdgeWave& b) {
    if (a.k != b.k) throw std::invalid_argument("wave_inner_product: wavenumber mismatch");
    double k = a.k, total = 0.0;
    for (int m = 0; m < g.num_edges(); ++m) {
        double l = g.edges[m].length;
        double A1 = a.coeff[m][0], B1 = a.coeff[m][1];
        double A2 = b.coeff[m][0], B2 = b.coeff[m][1];
        if (k == 0.0) {
            total += A1 * A2 * l + (A1 * B2 + A2 * B1) * l * l / 2.0 + B1 * B2 * l * l * l / 3.0;
        } else {
            double s2 = std::sin(2.0 * k * l), c2 = std::cos(2.0 * k * l);
            double Icc = l / 2.0 + s2 / (4.0 * k);
            double Iss = l / 2.0 - s2 / (4.0 * k);
            double Ics = (1.0 - c2) / (4.0 * k);
            total += A1 * A2 * Icc + (A1 * B2 + B1 * A2) * Ics + B1 * B2 * Iss;
        }
    }
    return total;
}

double wave_residual(const MetricGraph& g, const EdgeWave& w) {
    double amp = 0.0;
    for (int m = 0; m < g.num_edges(); ++m)
        amp = std::max(amp, std::hypot(w.coeff[m][0], w.coeff[m][1]));
    if (amp == 0.0) return 0.0;
    double worst = 0.0;
    double dscale = std::max(w.k, 1.0) * amp;
    for (int v = 0; v < g.num_vertices(); ++v) {
        const auto& cls = g.vertices[v];
        if (g.dirichlet[v]) {
            for (int s : cls) worst = std::max(worst, std::abs(wave_value_at_slot(g, w, s)) / amp);
        } else {
            double v0 = wave_value_at_slot(g, w, cls[0]);
            double kirch = 0.0;
            for (int s : cls) {
                worst = std::max(worst, std::abs(wave_value_at_slot(g, w, s) - v0) / amp);
                kirch += wave_inward_derivative(g, w, s);
            }
            worst = std::max(worst, std::abs(kirch) / dscale);
        }
    }
    return worst;
}

std::vector<EdgeWave> eigenfunction(const MetricGraph& g, double eigenvalue, const SpectralOptions& opts) {
    std::vector<EdgeWave> basis;
    if (eigenvalue < 1e-12) {
        for (const auto& comp : components(g)) {
            if (comp.graph.has_dirichlet()) continue;
            EdgeWave w;
            w.k = 0.0;
            w.coeff.assign(g.num_edges(), {0.0, 0.0});
            double norm = std::sqrt(comp.graph.total_length());
            for (int e : comp.edge_map) w.coeff[e] = {1.0 / norm, 0.0};
            basis.push_back(std::move(w));
        }
        if (basis.empty()) throw std::invalid_argument("eigenfunction: 0 is not an eigenvalue here");
        return basis;
    }
    double k = std::sqrt(eigenvalue);
    Eigen::MatrixXd A = assemble_secular(g, k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = std::max(sv(0), 1.0);
    int mult = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) < opts.tol_mult_scale * smax) ++mult;
    if (mult == 0) throw std::invalid_argument("eigenfunction: value is not a computed eigenvalue");
    std::vector<EdgeWave> raw;
    for (int j = 0; j < mult; ++j) {
        Eigen::VectorXd v = svd.matrixV().col(sv.size() - 1 - j);
        EdgeWave w;
        w.k = k;
        w.coeff.resize(g.num_edges());
        for (int m = 0; m < g.num_edges(); ++m) w.coeff[m] = {v(2 * m), v(2 * m + 1)};
        raw.push_back(std::move(w));
    }
    // Gram-Schmidt in the L2 inner product.
    for (std::size_t i = 0; i < raw.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            double c = wave_inner_product(g, raw[i], basis[j]);
            for (int m = 0; m < g.num_edges(); ++m) {
                raw[i].coeff[m][0] -= c * basis[j].coeff[m][0];
                raw[i].coeff[m][1] -= c * basis[j].coeff[m][1];
            }
        }
        double nrm = std::sqrt(std::max(wave_inner_product(g, raw[i], raw[i]), 0.0));
        if (nrm < 1e-10) continue;
        for (int m = 0; m < g.num_edges(); ++m) {
            raw[i].coeff[m][0] /= nrm;
            raw[i].coeff[m][1] /= nrm;
        }
        basis.push_back(raw[i]);
    }
    return basis;
}

// ---------------------------------------------------------------------------

double solve_fork(double a) {
    if (!(a > 0.0) || !(a < 1.0)) throw std::invalid_argument("solve_fork: a must lie in (0,1)");
    auto h = [a](double w) { return 2.0 * std::tan(a * w) - std::cos(w) / std::sin(w); };
    double lo = 1e-12, hi = kPi / 2.0 - 1e-14;
    // h(lo) -> -inf, h(hi) > 0
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (h(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    return 0.5 * (lo + hi);
}

SpectralResult von_below_equilateral(const MetricGraph& g, int count) {
    if (!is_connected(g)) throw std::invalid_argument("von_below_equilateral: graph must be connected");
    if (g.has_dirichlet()) throw std::invalid_argument("von_below_equilateral: Dirichlet vertices unsupported");
    const int M = g.num_edges(), N = g.num_vertices();
    double l = g.edges[0].length;
    for (const auto& e : g.edges)
        if (std::abs(e.length - l) > 1e-12 * l)
            throw std::invalid_argument("von_below_equilateral: graph is not equilateral");

    // transition matrix eigenvalues via the symmetrised D^{-1/2} A D^{-1/2}
    Eigen::MatrixXd Adj = Eigen::MatrixXd::Zero(N, N);
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(N);
    bool has_loop = false;
    for (int m = 0; m < M; ++m) {
        int u = g.vertex_of_slot(MetricGraph::slot(m, 0));
        int v = g.vertex_of_slot(MetricGraph::slot(m, 1));
        if (u == v) {
            Adj(u, u) += 2.0;
            has_loop = true;
        } else {
            Adj(u, v) += 1.0;
            Adj(v, u) += 1.0;
        }
        deg(u) += 1.0;
        deg(v) += 1.0;
    }
    Eigen::VectorXd dinv = deg.array().sqrt().inverse();
    Eigen::MatrixXd S = dinv.asDiagonal() * Adj * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    Eigen::VectorXd tvals = es.eigenvalues();

    // bipartite test (loops and odd cycles break it)
    bool bipartite = !has_loop;
    if (bipartite) {
        std::vector<int> color(N, -1);
        for (int start = 0; start < N && bipartite; ++start) {
            if (color[start] != -1) continue;
            color[start] = 0;
            std::vector<int> stack{start};
            while (!stack.empty() && bipartite) {
                int u = stack.back();
                stack.pop_back();
                for (int m = 0; m < M; ++m) {
                    int a = g.vertex_of_slot(MetricGraph::slot(m, 0));
                    int b = g.vertex_of_slot(MetricGraph::slot(m, 1));
                    if (a != u && b != u) continue;
                    int w = (a == u) ? b : a;
                    if (color[w] == -1) {
                        color[w] = 1 - color[u];
                        stack.push_back(w);
                    } else if (color[w] == color[u]) {
                        bipartite = false;
                        break;
                    }
                }
            }
        }
    }

    std::vector<std::pair<double, int>> entries;
    entries.push_back({0.0, 1});
    const int even_mult = M - N + 2;
    const int odd_mult = bipartite ? M - N + 2 : M - N;
    int enough = count + 4;
    for (int j = 1; static_cast<int>(entries.size()) < 4 * enough && j < 4 * enough; ++j) {
        double k = j * kPi / l;
        int mult = (j % 2 == 0) ? even_mult : odd_mult;
        if (mult > 0) entries.push_back({k * k, mult});
    }
    // non-vertex eigenvalues from transition eigenvalues in (-1,1)
    for (int i = 0; i < tvals.size(); ++i) {
        double mu = tvals(i);
        if (mu >= 1.0 - 1e-12 || mu <= -1.0 + 1e-12) continue;
        double ac = std::acos(mu);
        for (int band = 0; band < 2 * enough; ++band) {
            double k1 = (2.0 * kPi * band + ac) / l;
            double k2 = (2.0 * kPi * (band + 1) - ac) / l;
            entries.push_back({k1 * k1, 1});
            entries.push_back({k2 * k2, 1});
        }
    }
    std::sort(entries.begin(), entries.end());
    // merge equal values (transition-matrix multiplicities add up)
    std::vector<std::pair<double, int>> merged;
    for (auto& [v, m] : entries) {
        if (!merged.empty() && std::abs(merged.back().first - v) < 1e-9 * (1.0 + v))
            merged.back().second += m;
        else
            merged.push_back({v, m});
    }
    SpectralResult res;
    res.method = "von-below";
    for (auto& [v, m] : merged) {
        for (int i = 0; i < m && static_cast<int>(res.values.size()) < count; ++i) {
            res.values.push_back(v);
            res.kernel_dim.push_back(m);
            res.error.push_back(1e-14 * (1.0 + v));
        }
        if (static_cast<int>(res.values.size()) >= count) break;
    }
    return res;
}

}  // namespace qgp
