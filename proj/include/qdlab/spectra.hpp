#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <thread>
#include <vector>

#include "qdlab/models.hpp"

namespace qdlab {

/// Outcome of the ground-space trace oracle next to the closed formula.
struct GsdResult {
    std::uint64_t dimension = 0;
    double trace = 0.0;
    std::uint64_t oracle = 0;
    bool has_formula = false;   // vertex-matter models carry no (N, K, n) formula
    std::uint64_t formula = 0;  // |ker f| * |coker f|^(2 genus), genus 1
    bool match = false;
    std::uint64_t flat_states = 0;  // basis states passing the diagonal constraints
    double seconds = 0.0;
};

namespace detail {

struct Branch {
    std::uint64_t idx;
    cplx amp;
};

/// Applies one operator to a sorted branch list, merging collisions.
inline void apply_sorted(const LocalOp& op, std::vector<Branch>& in,
                         std::vector<Branch>& out, std::vector<std::uint32_t>& scratch) {
    out.clear();
    for (const Branch& b : in)
        op.for_each_from(b.idx, scratch, [&](std::uint64_t nidx, cplx v) {
            out.push_back({nidx, v * b.amp});
        });
    std::sort(out.begin(), out.end(),
              [](const Branch& a, const Branch& b) { return a.idx < b.idx; });
    std::size_t w = 0;
    for (std::size_t i = 0; i < out.size();) {
        std::uint64_t idx = out[i].idx;
        cplx acc = 0.0;
        for (; i < out.size() && out[i].idx == idx; ++i) acc += out[i].amp;
        out[w++] = {idx, acc};
    }
    out.resize(w);
}

/// <a|b> for sorted branch lists.
inline cplx inner_sorted(const std::vector<Branch>& a, const std::vector<Branch>& b) {
    cplx acc = 0.0;
    std::size_t i = 0, k = 0;
    while (i < a.size() && k < b.size()) {
        if (a[i].idx < b[k].idx)
            ++i;
        else if (a[i].idx > b[k].idx)
            ++k;
        else
            acc += std::conj(a[i++].amp) * b[k++].amp;
    }
    return acc;
}

}  // namespace detail

/**
 * @brief Ground-space dimension by the projector-product trace.
 *
 * Sweeps every computational basis state, applies the non-diagonal projector
 * products matrix-free and accumulates <b| prod |b>; the diagonal terms
 * (face words, comparators) gate the sweep up front.  The result must round
 * to an integer within 1e-6 or the run aborts.  Deterministic: partial sums
 * are reduced in fixed chunk order regardless of thread scheduling.
 */
inline GsdResult ground_space_dimension(const Model& model, std::uint64_t cap = 2000000,
                                        unsigned n_threads = 0) {
    const SiteLayout& lay = model.layout();
    GsdResult res;
    res.dimension = lay.dim();
    if (lay.dim() > cap)
        throw std::invalid_argument("state space dimension " + std::to_string(lay.dim()) +
                                    " exceeds the configured cap " + std::to_string(cap));
    auto t0 = std::chrono::steady_clock::now();

    if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t chunk = 1u << 14;
    const std::uint64_t n_chunks = (lay.dim() + chunk - 1) / chunk;
    std::vector<double> partial(n_chunks, 0.0);
    std::vector<std::uint64_t> flat_count(n_chunks, 0);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&]() {
        std::vector<detail::Branch> left, right, tmp;
        std::vector<std::uint32_t> scratch(16);
        while (true) {
            std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) break;
            std::uint64_t lo = c * chunk, hi = std::min(lay.dim(), lo + chunk);
            double acc = 0.0;
            std::uint64_t flats = 0;
            for (std::uint64_t b = lo; b < hi; ++b) {
                if (!model.diagonal_terms_satisfied(b)) continue;
                ++flats;
                // <b| prod(edge) prod(vertex) |b> with both factors Hermitian
                left.assign(1, {b, 1.0});
                for (const LocalOp& t : model.vertex_terms()) {
                    detail::apply_sorted(t, left, tmp, scratch);
                    std::swap(left, tmp);
                }
                if (model.spec().family == Family::DualMatter) {
                    right.assign(1, {b, 1.0});
                    for (const LocalOp& t : model.edge_terms()) {
                        detail::apply_sorted(t, right, tmp, scratch);
                        std::swap(right, tmp);
                    }
                    acc += detail::inner_sorted(right, left).real();
                } else {
                    auto it = std::lower_bound(
                        left.begin(), left.end(), b,
                        [](const detail::Branch& x, std::uint64_t v) { return x.idx < v; });
                    if (it != left.end() && it->idx == b) acc += it->amp.real();
                }
            }
            partial[c] = acc;
            flat_count[c] = flats;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    double trace = 0.0;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        trace += partial[c];
        res.flat_states += flat_count[c];
    }
    res.trace = trace;
    double rounded = std::round(trace);
    if (std::abs(trace - rounded) > 1e-6)
        throw std::runtime_error("projector-product trace " + std::to_string(trace) +
                                 " is not an integer within 1e-6");
    res.oracle = static_cast<std::uint64_t>(rounded);
    if (model.spec().family != Family::VertexMatter) {
        res.has_formula = true;
        res.formula = gsd_formula(model.spec().hom(), 1);
        res.match = res.formula == res.oracle;
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

/**
 * @brief Projected product-state ground state.
 *
 * Projects the reference state (all qunits at 0 except one matter site held
 * at the given value) with every Hamiltonian term and normalizes.  A zero
 * projection means the reference sits outside the ground sector, e.g. a face
 * value outside ker f under a faithful coupling.
 */
inline SparseVec ground_state(const Model& model, std::uint32_t matter_value,
                              std::uint32_t matter_site_index = 0) {
    const SiteLayout& lay = model.layout();
    std::uint64_t ref = 0;
    if (model.spec().family == Family::VertexMatter) {
        if (matter_value >= model.spec().theta.m())
            throw std::invalid_argument("matter value out of range");
        ref = matter_value * lay.stride(lay.vertex_site(matter_site_index));
    } else {
        if (matter_value >= model.spec().matter_dim())
            throw std::invalid_argument("matter value out of range");
        ref = matter_value * lay.stride(lay.face_site(matter_site_index));
    }
    SparseVec psi = SparseVec::basis_state(ref);
    // diagonal faces first (may already kill the state), then the cheaper
    // vertex expansion, then the edge terms
    for (const LocalOp& t : model.face_terms()) psi = t.apply(psi);
    for (const LocalOp& t : model.vertex_terms()) psi = t.apply(psi);
    for (const LocalOp& t : model.edge_terms()) psi = t.apply(psi);
    psi.prune(1e-14);
    if (psi.norm() < 1e-12)
        throw std::runtime_error("reference state outside ground sector");
    psi.normalize();
    return psi;
}

/// Z-type transporter along a primal path: product of Z^(+-g) per edge.
inline LocalOp string_z(const SiteLayout& lay, std::uint32_t n_gauge, const Path& path,
                        std::uint32_t g) {
    std::vector<std::pair<std::uint32_t, Mat>> factors;
    for (const PathStep& s : path)
        factors.emplace_back(lay.edge_site(s.edge),
                             clock_matrix(n_gauge, static_cast<std::int64_t>(g) * s.sign));
    return factors.empty() ? LocalOp::identity() : LocalOp::from_sites(lay, factors);
}

/// X-type transporter along a dual path: product of X^(+-g) per edge.
inline LocalOp string_x(const SiteLayout& lay, std::uint32_t n_gauge, const DualPath& path,
                        std::uint32_t g) {
    std::vector<std::pair<std::uint32_t, Mat>> factors;
    for (const PathStep& s : path)
        factors.emplace_back(lay.edge_site(s.edge),
                             shift_matrix(n_gauge, static_cast<std::int64_t>(g) * s.sign));
    return factors.empty() ? LocalOp::identity() : LocalOp::from_sites(lay, factors);
}

struct ConfinementProfile {
    std::vector<std::pair<std::uint32_t, double>> entries;  // (path length, energy increase)
};

enum class StringKind { Z, X };

/// Energy increase of transporting charge g along straight strings of the
/// given lengths, measured against the projected ground state.
inline ConfinementProfile confinement_profile(const Model& model, std::uint32_t g,
                                              const std::vector<std::uint32_t>& lengths,
                                              StringKind kind = StringKind::Z) {
    SparseVec xi0 = ground_state(model, 0);
    double e0 = model.energy(xi0);
    ConfinementProfile prof;
    for (std::uint32_t len : lengths) {
        LocalOp op = kind == StringKind::Z
                         ? string_z(model.layout(), model.spec().n_gauge,
                                    model.lattice().straight_path(0, Direction::East, len), g)
                         : string_x(model.layout(), model.spec().n_gauge,
                                    model.lattice().straight_dual_path(0, Direction::East, len),
                                    g);
        SparseVec psi = op.apply(xi0);
        psi.normalize();
        prof.entries.emplace_back(len, model.energy(psi) - e0);
    }
    return prof;
}

/// Energy increase from one explicit string operator.
inline double string_energy_shift(const Model& model, const LocalOp& op) {
    SparseVec xi0 = ground_state(model, 0);
    double e0 = model.energy(xi0);
    SparseVec psi = op.apply(xi0);
    psi.normalize();
    return model.energy(psi) - e0;
}

/// A face-centroid monomial Xtilde^x Ztilde^z (phases dropped).
struct WMonomial {
    std::uint32_t x_pow, z_pow;
};

/**
 * @brief Intertwiner table of face-centroid monomials.
 *
 * entries[J][K] lists every monomial W with B(p,J) W = W B(p,0) and
 * D(j,K) W = W D(j,0) for all four edges adjacent to the face (labels are
 * 0-based; label 0 is the trivial character, i.e. the Hamiltonian member).
 */
struct WOperatorTable {
    std::uint32_t face = 0;
    std::uint32_t n_face_labels = 0, n_edge_labels = 0;
    std::vector<std::vector<std::vector<WMonomial>>> entries;
};

inline WOperatorTable solve_w_operators(const Model& model, std::uint32_t p = 0,
                                        double tol = 1e-10) {
    if (model.spec().family == Family::VertexMatter)
        throw std::invalid_argument("W operators live on the dual family's face matter");
    const SiteLayout& lay = model.layout();
    const TorusLattice& lat = model.lattice();
    const std::uint32_t n = model.spec().n_gauge;
    const std::uint32_t k = model.spec().matter_dim();

    auto b_family = build_projector_family(lay, lat, model.spec(), TermKind::Face, p);
    BoundaryIncidence bd = lat.face_boundary(p);
    std::vector<std::vector<LocalOp>> d_families;
    for (std::uint32_t j : bd.edges())
        d_families.push_back(build_projector_family(lay, lat, model.spec(), TermKind::Edge, j));

    WOperatorTable table;
    table.face = p;
    table.n_face_labels = n;
    table.n_edge_labels = k;
    table.entries.assign(n, std::vector<std::vector<WMonomial>>(k));

    for (std::uint32_t a = 0; a < k; ++a)
        for (std::uint32_t b = 0; b < k; ++b) {
            Mat w_mat = shift_matrix(k, a) * clock_matrix(k, b);
            LocalOp w = LocalOp::single_site(lay, lay.face_site(p), w_mat);
            for (std::uint32_t jj = 0; jj < n; ++jj) {
                if (diff_norm(lay, compose(lay, b_family[jj], w), compose(lay, w, b_family[0])) >
                    tol)
                    continue;
                for (std::uint32_t kk = 0; kk < k; ++kk) {
                    bool ok = true;
                    for (const auto& fam : d_families)
                        if (diff_norm(lay, compose(lay, fam[kk], w), compose(lay, w, fam[0])) >
                            tol) {
                            ok = false;
                            break;
                        }
                    if (ok) table.entries[jj][kk].push_back({a, b});
                }
            }
        }
    return table;
}

/**
 * @brief Edge operator in the character basis.
 *
 * Conjugates D_j by the per-site Fourier unitaries on its support and checks
 * that the result is diagonal with eigenvalues
 *   (1/K) sum_l chi_{a'}(l) conj(w_{g'}(f(l))) conj(chi_{b'}(l)),
 * the transform of the composed character over the matter group.
 */
struct EdgeDiagReport {
    std::uint32_t edge = 0;
    double max_offdiag = 0.0;
    double max_formula_err = 0.0;
    // one row per transformed label (alpha', g', beta') in support order
    std::vector<std::array<std::uint32_t, 3>> labels;
    std::vector<cplx> eigenvalues;
};

inline EdgeDiagReport diagonalize_edge_op(const Model& model, std::uint32_t j,
                                          double tol = 1e-10) {
    if (model.spec().family != Family::DualMatter && model.spec().family != Family::DoubleOnly)
        throw std::invalid_argument("edge diagonalization applies to the dual family");
    const SiteLayout& lay = model.layout();
    const TorusLattice& lat = model.lattice();
    const std::uint32_t n = model.spec().n_gauge;
    const std::uint32_t k = model.spec().matter_dim();
    const Homomorphism f = model.spec().hom();
    EdgeFaces fp = lat.edge_faces(j);

    LocalOp d_op = build_edge_op_dual(lay, lat, model.spec(), j);
    CharacterBasis cb(lay);
    Mat dc = cb.conjugate_support(d_op);

    // locate the support positions of (p1, edge, p2)
    const auto& sites = d_op.sites();
    auto pos_of = [&](std::uint32_t site) {
        return static_cast<std::size_t>(
            std::lower_bound(sites.begin(), sites.end(), site) - sites.begin());
    };
    std::size_t pos_p1 = pos_of(lay.face_site(fp.p1));
    std::size_t pos_edge = pos_of(lay.edge_site(j));
    std::size_t pos_p2 = pos_of(lay.face_site(fp.p2));

    EdgeDiagReport rep;
    rep.edge = j;
    std::vector<std::uint32_t> vals(sites.size());
    for (long r = 0; r < dc.rows(); ++r) {
        for (long c = 0; c < dc.cols(); ++c)
            if (r != c) rep.max_offdiag = std::max(rep.max_offdiag, std::abs(dc(r, c)));
        d_op.decode_support(static_cast<std::uint64_t>(r), vals);
        std::uint32_t ap = vals[pos_p1], gp = vals[pos_edge], bp = vals[pos_p2];
        cplx want = 0.0;
        for (std::uint32_t lam = 0; lam < k; ++lam)
            want += Character(k, ap)(lam) * std::conj(Character(n, gp)(f(lam))) *
                    std::conj(Character(k, bp)(lam));
        want /= static_cast<double>(k);
        rep.labels.push_back({ap, gp, bp});
        rep.eigenvalues.push_back(dc(r, r));
        rep.max_formula_err = std::max(rep.max_formula_err, std::abs(dc(r, r) - want));
    }
    if (rep.max_offdiag > tol)
        throw std::runtime_error("edge operator is not diagonal in the character basis");
    return rep;
}

/// Hermitian eigenvalues of the full Hamiltonian (dim <= 4096), ascending.
inline std::vector<double> dense_spectrum(const Model& model) {
    Mat h = model.dense_hamiltonian();
    Eigen::SelfAdjointEigenSolver<Mat> solver(h, Eigen::EigenvaluesOnly);
    std::vector<double> ev(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
    return ev;
}

inline std::uint64_t ground_multiplicity(const std::vector<double>& spectrum, double e0,
                                         double tol = 1e-8) {
    std::uint64_t c = 0;
    for (double e : spectrum) c += std::abs(e - e0) < tol;
    return c;
}

}  // namespace qdlab
