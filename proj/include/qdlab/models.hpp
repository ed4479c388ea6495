#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdlab/groups.hpp"
#include "qdlab/hilbert.hpp"
#include "qdlab/lattice.hpp"

namespace qdlab {

/**
 * @brief Left action of Z_N on a matter set {0..M-1}.
 *
 * Supported shapes: the trivial action, the regular action (M = N), and the
 * block form of one or more N-cycles plus fixed points (M = blocks*N + fixed).
 */
class ThetaAction {
   public:
    enum class Kind { Trivial, Regular, BlockShift };

    static ThetaAction trivial(std::uint32_t m) { return ThetaAction(Kind::Trivial, m, 0, m); }
    static ThetaAction regular(std::uint32_t n) { return ThetaAction(Kind::Regular, n, 1, 0); }
    static ThetaAction block_shift(std::uint32_t n, std::uint32_t blocks, std::uint32_t fixed) {
        if (blocks == 0) throw std::invalid_argument("block action needs at least one block");
        return ThetaAction(Kind::BlockShift, blocks * n + fixed, blocks, fixed);
    }

    Kind kind() const { return kind_; }
    std::uint32_t m() const { return m_; }
    std::uint32_t blocks() const { return blocks_; }
    std::uint32_t fixed_points() const { return fixed_; }

    bool compatible_with(std::uint32_t n_gauge) const {
        switch (kind_) {
            case Kind::Trivial: return m_ >= 1;
            case Kind::Regular: return m_ == n_gauge;
            case Kind::BlockShift: return m_ == blocks_ * n_gauge + fixed_;
        }
        return false;
    }

    std::uint32_t apply(std::uint32_t n_gauge, std::uint32_t g, std::uint32_t alpha) const {
        g %= n_gauge;
        switch (kind_) {
            case Kind::Trivial: return alpha;
            case Kind::Regular: return (alpha + g) % m_;
            case Kind::BlockShift: {
                std::uint32_t cyc = blocks_ * n_gauge;
                if (alpha >= cyc) return alpha;
                return (alpha / n_gauge) * n_gauge + (alpha % n_gauge + g) % n_gauge;
            }
        }
        return alpha;
    }

    /// M x M permutation matrix of the action of g.
    Mat matrix(std::uint32_t n_gauge, std::uint32_t g) const {
        Mat t = Mat::Zero(m_, m_);
        for (std::uint32_t a = 0; a < m_; ++a) t(apply(n_gauge, g, a), a) = 1.0;
        return t;
    }

    std::string descriptor() const {
        switch (kind_) {
            case Kind::Trivial: return "trivial";
            case Kind::Regular: return "regular";
            case Kind::BlockShift:
                return "block:" + std::to_string(blocks_) + "x" + std::to_string(fixed_);
        }
        return "?";
    }

   private:
    ThetaAction(Kind k, std::uint32_t m, std::uint32_t blocks, std::uint32_t fixed)
        : kind_(k), m_(m), blocks_(blocks), fixed_(fixed) {
        if (m == 0) throw std::invalid_argument("matter set must be non-empty");
    }

    Kind kind_;
    std::uint32_t m_, blocks_, fixed_;
};

enum class Family { DoubleOnly, DualMatter, VertexMatter };

inline const char* to_string(Family f) {
    switch (f) {
        case Family::DoubleOnly: return "double";
        case Family::DualMatter: return "dual";
        default: return "vertex";
    }
}

/**
 * @brief Everything needed to build one model deterministically.
 *
 * DualMatter is the face-matter family with coupling f(x) = n x; DoubleOnly
 * is its K = 1 reduction without the (identity) edge terms; VertexMatter is
 * the vertex-matter family driven by a theta action.
 */
struct ModelSpec {
    Family family = Family::DualMatter;
    std::uint32_t n_gauge = 2;
    std::uint32_t k_matter = 1;   // face matter dimension (dual family)
    std::uint32_t multiplier = 0; // homomorphism multiplier n (dual family)
    ThetaAction theta = ThetaAction::trivial(1);  // vertex family
    std::uint32_t rows = 2, cols = 2;
    FaceConvention convention = FaceConvention::Standard;

    void validate() const {
        if (n_gauge == 0) throw std::invalid_argument("gauge order must be >= 1");
        if (rows < 2 || cols < 2) throw std::invalid_argument("degenerate lattice");
        switch (family) {
            case Family::DoubleOnly:
                if (k_matter != 1) throw std::invalid_argument("double family has no matter");
                break;
            case Family::DualMatter:
                if (k_matter == 0) throw std::invalid_argument("matter order must be >= 1");
                if (!Homomorphism::is_valid_multiplier(k_matter, n_gauge, multiplier))
                    throw std::invalid_argument(
                        "not a homomorphism: n=" + std::to_string(multiplier) + " needs N | nK");
                break;
            case Family::VertexMatter:
                if (!theta.compatible_with(n_gauge))
                    throw std::invalid_argument("theta action incompatible with gauge order");
                break;
        }
    }

    std::uint32_t matter_dim() const {
        return family == Family::VertexMatter ? theta.m() : k_matter;
    }

    /// The co-action homomorphism (trivial Z_1 -> Z_N for DoubleOnly).
    Homomorphism hom() const {
        if (family == Family::VertexMatter)
            throw std::invalid_argument("vertex family has no co-action homomorphism");
        return family == Family::DoubleOnly ? Homomorphism(1, n_gauge, 0)
                                            : Homomorphism(k_matter, n_gauge, multiplier);
    }
};

enum class TermKind { Vertex, Face, Edge };

// ---------------------------------------------------------------------------
// Operator builders.  Components follow the matrix conventions: the g-labelled
// vertex component shifts outgoing star edges by -g and incoming ones by +g;
// the lambda-labelled edge component shifts face p1 by +lambda, the edge by
// +f(lambda) and face p2 by -lambda; face operators are pure deltas on the
// fake holonomy f(matter) + (oriented boundary word).
// ---------------------------------------------------------------------------

inline LocalOp build_vertex_component(const SiteLayout& lay, const TorusLattice& lat,
                                      const ModelSpec& spec, std::uint32_t v, std::uint32_t g) {
    const std::uint32_t n = spec.n_gauge;
    StarIncidence star = lat.vertex_star(v);
    std::vector<std::pair<std::uint32_t, Mat>> factors;
    factors.emplace_back(lay.edge_site(star.a), shift_matrix(n, -static_cast<std::int64_t>(g)));
    factors.emplace_back(lay.edge_site(star.b), shift_matrix(n, -static_cast<std::int64_t>(g)));
    factors.emplace_back(lay.edge_site(star.c), shift_matrix(n, g));
    factors.emplace_back(lay.edge_site(star.d), shift_matrix(n, g));
    if (spec.family == Family::VertexMatter)
        factors.emplace_back(lay.vertex_site(v), spec.theta.matrix(n, g));
    return LocalOp::from_sites(lay, factors);
}

inline LocalOp build_vertex_op(const SiteLayout& lay, const TorusLattice& lat,
                               const ModelSpec& spec, std::uint32_t v) {
    const std::uint32_t n = spec.n_gauge;
    LocalOp acc = build_vertex_component(lay, lat, spec, v, 0);
    for (std::uint32_t g = 1; g < n; ++g)
        acc = add(lay, acc, build_vertex_component(lay, lat, spec, v, g));
    return acc.scaled(1.0 / static_cast<double>(n));
}

/// Fake holonomy of face p in a basis state: f(matter value) plus the
/// oriented boundary word, reduced mod N.  The vertex-matter and pure-gauge
/// families use the same word with no matter contribution.
inline std::uint32_t fake_holonomy(const SiteLayout& lay, const TorusLattice& lat,
                                   const ModelSpec& spec, std::uint32_t p, std::uint64_t idx) {
    const std::uint32_t n = spec.n_gauge;
    BoundaryIncidence b = lat.face_boundary(p);
    std::int64_t word = 0;
    for (std::uint32_t j : b.edges())
        word += static_cast<std::int64_t>(lat.boundary_sign(p, j)) *
                static_cast<std::int64_t>(lay.value_at(idx, lay.edge_site(j)));
    if (spec.family == Family::DualMatter)
        word += spec.hom()(lay.value_at(idx, lay.face_site(p)));
    return CyclicGroup(n).canon(word);
}

/// Diagonal projector selecting fake holonomy == h on face p.
inline LocalOp build_face_component(const SiteLayout& lay, const TorusLattice& lat,
                                    const ModelSpec& spec, std::uint32_t p, std::uint32_t h) {
    const std::uint32_t n = spec.n_gauge;
    const Homomorphism f = spec.family == Family::DualMatter
                               ? spec.hom()
                               : Homomorphism(1, n, 0);
    BoundaryIncidence b = lat.face_boundary(p);
    std::vector<std::uint32_t> sites;
    std::vector<std::int64_t> signs;
    for (std::uint32_t j : b.edges()) {
        sites.push_back(lay.edge_site(j));
        signs.push_back(lat.boundary_sign(p, j));
    }
    if (spec.family == Family::DualMatter) sites.push_back(lay.face_site(p));

    // diagonal() sorts the support; map positions after sorting.
    std::vector<std::uint32_t> sorted = sites;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> pos(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i)
        pos[i] = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), sites[i]) - sorted.begin());

    CyclicGroup zn(n);
    const std::size_t n_edges_in_word = signs.size();
    return LocalOp::diagonal(lay, sorted, [=](const std::vector<std::uint32_t>& vals) -> cplx {
        std::int64_t word = 0;
        for (std::size_t i = 0; i < n_edges_in_word; ++i)
            word += signs[i] * static_cast<std::int64_t>(vals[pos[i]]);
        if (spec.family == Family::DualMatter)
            word += f(vals[pos[n_edges_in_word]]);
        return zn.canon(word) == h ? 1.0 : 0.0;
    });
}

inline LocalOp build_face_op(const SiteLayout& lay, const TorusLattice& lat,
                             const ModelSpec& spec, std::uint32_t p) {
    return build_face_component(lay, lat, spec, p, 0);
}

inline LocalOp build_edge_component_dual(const SiteLayout& lay, const TorusLattice& lat,
                                         const ModelSpec& spec, std::uint32_t j,
                                         std::uint32_t lambda) {
    const std::uint32_t n = spec.n_gauge;
    const std::uint32_t k = spec.matter_dim();
    const Homomorphism f = spec.hom();
    EdgeFaces fp = lat.edge_faces(j);
    std::vector<std::pair<std::uint32_t, Mat>> factors;
    factors.emplace_back(lay.face_site(fp.p1), shift_matrix(k, lambda));
    factors.emplace_back(lay.edge_site(j), shift_matrix(n, f(lambda)));
    factors.emplace_back(lay.face_site(fp.p2), shift_matrix(k, -static_cast<std::int64_t>(lambda)));
    return LocalOp::from_sites(lay, factors);
}

inline LocalOp build_edge_op_dual(const SiteLayout& lay, const TorusLattice& lat,
                                  const ModelSpec& spec, std::uint32_t j) {
    const std::uint32_t k = spec.matter_dim();
    LocalOp acc = build_edge_component_dual(lay, lat, spec, j, 0);
    for (std::uint32_t lam = 1; lam < k; ++lam)
        acc = add(lay, acc, build_edge_component_dual(lay, lat, spec, j, lam));
    return acc.scaled(1.0 / static_cast<double>(k));
}

/// Comparator C_j of the vertex-matter family: eigenvalue 1 on basis states
/// with theta(edge value, tail matter) == head matter.
inline LocalOp build_edge_comparator(const SiteLayout& lay, const TorusLattice& lat,
                                     const ModelSpec& spec, std::uint32_t j) {
    const std::uint32_t n = spec.n_gauge;
    const ThetaAction theta = spec.theta;
    auto [tail, head] = lat.edge_vertices(j);
    std::vector<std::uint32_t> sites{lay.edge_site(j), lay.vertex_site(tail),
                                     lay.vertex_site(head)};
    std::vector<std::uint32_t> sorted = sites;
    std::sort(sorted.begin(), sorted.end());
    std::array<std::size_t, 3> pos{};
    for (std::size_t i = 0; i < 3; ++i)
        pos[i] = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), sites[i]) - sorted.begin());
    return LocalOp::diagonal(lay, sorted, [=](const std::vector<std::uint32_t>& vals) -> cplx {
        return theta.apply(n, vals[pos[0]], vals[pos[1]]) == vals[pos[2]] ? 1.0 : 0.0;
    });
}

/// Character-resolved orthogonal projector family refining one term.  The
/// J = 0 member (trivial character) is the Hamiltonian term itself.
inline std::vector<LocalOp> build_projector_family(const SiteLayout& lay,
                                                   const TorusLattice& lat,
                                                   const ModelSpec& spec, TermKind kind,
                                                   std::uint32_t site) {
    std::vector<LocalOp> family;
    switch (kind) {
        case TermKind::Vertex: {
            const std::uint32_t n = spec.n_gauge;
            std::vector<LocalOp> comps;
            for (std::uint32_t g = 0; g < n; ++g)
                comps.push_back(build_vertex_component(lay, lat, spec, site, g));
            for (std::uint32_t j = 0; j < n; ++j) {
                LocalOp acc = comps[0];
                for (std::uint32_t g = 1; g < n; ++g)
                    acc = add(lay, acc, comps[g].scaled(std::conj(Character(n, j)(g))));
                family.push_back(acc.scaled(1.0 / static_cast<double>(n)));
            }
            break;
        }
        case TermKind::Face: {
            for (std::uint32_t h = 0; h < spec.n_gauge; ++h)
                family.push_back(build_face_component(lay, lat, spec, site, h));
            break;
        }
        case TermKind::Edge: {
            if (spec.family != Family::DualMatter && spec.family != Family::DoubleOnly)
                throw std::invalid_argument("edge projector family requires the dual family");
            const std::uint32_t k = spec.matter_dim();
            std::vector<LocalOp> comps;
            for (std::uint32_t lam = 0; lam < k; ++lam)
                comps.push_back(build_edge_component_dual(lay, lat, spec, site, lam));
            for (std::uint32_t j = 0; j < k; ++j) {
                LocalOp acc = comps[0];
                for (std::uint32_t lam = 1; lam < k; ++lam)
                    acc = add(lay, acc, comps[lam].scaled(std::conj(Character(k, j)(lam))));
                family.push_back(acc.scaled(1.0 / static_cast<double>(k)));
            }
            break;
        }
    }
    return family;
}

/**
 * @brief A built commuting-projector model: lattice, layout and all terms.
 *
 * H = -sum(vertex) - sum(face) - sum(edge); every term is a projector, so the
 * ground energy is -(number of terms) whenever the model is frustration-free.
 */
class Model {
   public:
    explicit Model(const ModelSpec& spec)
        : spec_(spec),
          lattice_(make_lattice(spec)),
          layout_(make_layout(spec, lattice_)) {
        spec_.validate();
        build_terms();
    }

    const ModelSpec& spec() const { return spec_; }
    const TorusLattice& lattice() const { return lattice_; }
    const SiteLayout& layout() const { return layout_; }

    const std::vector<LocalOp>& vertex_terms() const { return vertex_terms_; }
    const std::vector<LocalOp>& face_terms() const { return face_terms_; }
    const std::vector<LocalOp>& edge_terms() const { return edge_terms_; }

    std::vector<const LocalOp*> terms() const {
        std::vector<const LocalOp*> out;
        for (const auto& t : vertex_terms_) out.push_back(&t);
        for (const auto& t : face_terms_) out.push_back(&t);
        for (const auto& t : edge_terms_) out.push_back(&t);
        return out;
    }

    std::size_t n_terms() const {
        return vertex_terms_.size() + face_terms_.size() + edge_terms_.size();
    }

    double ground_energy() const { return -static_cast<double>(n_terms()); }

    double energy(const SparseVec& psi) const {
        double e = 0;
        for (const LocalOp* t : terms()) e -= t->expectation(psi).real();
        return e;
    }

    /// All diagonal constraints (face words, comparators) satisfied at idx.
    bool diagonal_terms_satisfied(std::uint64_t idx) const {
        for (std::uint32_t p = 0; p < lattice_.n_faces(); ++p)
            if (fake_holonomy(layout_, lattice_, spec_, p, idx) != 0) return false;
        if (spec_.family == Family::VertexMatter) {
            for (std::uint32_t j = 0; j < lattice_.n_edges(); ++j) {
                auto [tail, head] = lattice_.edge_vertices(j);
                std::uint32_t x = layout_.value_at(idx, layout_.edge_site(j));
                std::uint32_t a = layout_.value_at(idx, layout_.vertex_site(tail));
                std::uint32_t b = layout_.value_at(idx, layout_.vertex_site(head));
                if (spec_.theta.apply(spec_.n_gauge, x, a) != b) return false;
            }
        }
        return true;
    }

    /// Dense Hamiltonian for small spaces (dim <= 4096).
    Mat dense_hamiltonian() const {
        if (layout_.dim() > 4096)
            throw std::invalid_argument("dense Hamiltonian limited to dimension 4096");
        Mat h = Mat::Zero(static_cast<long>(layout_.dim()), static_cast<long>(layout_.dim()));
        for (const LocalOp* t : terms()) t->add_to_dense_full(layout_, h, -1.0);
        return h;
    }

   private:
    static TorusLattice make_lattice(const ModelSpec& spec) {
        spec.validate();
        return TorusLattice(spec.rows, spec.cols, spec.convention);
    }
    static SiteLayout make_layout(const ModelSpec& spec, const TorusLattice& lat) {
        switch (spec.family) {
            case Family::DoubleOnly: return SiteLayout::gauge_only(lat, spec.n_gauge);
            case Family::DualMatter: return SiteLayout::dual(lat, spec.n_gauge, spec.k_matter);
            default: return SiteLayout::vertex_matter(lat, spec.n_gauge, spec.theta.m());
        }
    }

    void build_terms() {
        for (std::uint32_t v = 0; v < lattice_.n_vertices(); ++v)
            vertex_terms_.push_back(build_vertex_op(layout_, lattice_, spec_, v));
        for (std::uint32_t p = 0; p < lattice_.n_faces(); ++p)
            face_terms_.push_back(build_face_op(layout_, lattice_, spec_, p));
        if (spec_.family == Family::DualMatter) {
            for (std::uint32_t j = 0; j < lattice_.n_edges(); ++j)
                edge_terms_.push_back(build_edge_op_dual(layout_, lattice_, spec_, j));
        } else if (spec_.family == Family::VertexMatter) {
            for (std::uint32_t j = 0; j < lattice_.n_edges(); ++j)
                edge_terms_.push_back(build_edge_comparator(layout_, lattice_, spec_, j));
        }
    }

    ModelSpec spec_;
    TorusLattice lattice_;
    SiteLayout layout_;
    std::vector<LocalOp> vertex_terms_, face_terms_, edge_terms_;
};

/// Pairwise solvability certificate for one spec on its lattice.
struct SolvabilityReport {
    bool spec_valid = false;
    std::string message;
    bool abelian_ok = false;  // matter and image abelian (cyclic groups: always)
    bool center_ok = false;   // Im f central in G (abelian G: always)
    double max_projector_defect = 0.0;
    double max_hermiticity_defect = 0.0;
    double max_commutator = 0.0;
    std::string worst_pair;
    std::uint64_t dimension = 0;

    bool passed(double tol) const {
        return spec_valid && abelian_ok && center_ok && max_projector_defect < tol &&
               max_hermiticity_defect < tol && max_commutator < tol;
    }
};

/// Checks every term pair of the model; reports, never throws.
inline SolvabilityReport solvability_check(const ModelSpec& spec) {
    SolvabilityReport rep;
    try {
        spec.validate();
    } catch (const std::exception& e) {
        rep.message = e.what();
        return rep;
    }
    rep.spec_valid = true;
    rep.abelian_ok = true;  // cyclic matter and gauge groups throughout
    rep.center_ok = true;   // abelian G is its own centre
    Model model(spec);
    rep.dimension = model.layout().dim();
    auto terms = model.terms();
    auto label = [&](std::size_t i) {
        std::uint32_t nv = model.lattice().n_vertices();
        std::uint32_t nf = model.lattice().n_faces();
        if (i < nv) return "A[v=" + std::to_string(i) + "]";
        if (i < nv + nf) return "B[p=" + std::to_string(i - nv) + "]";
        return (spec.family == Family::VertexMatter ? "C[j=" : "D[j=") +
               std::to_string(i - nv - nf) + "]";
    };
    for (std::size_t i = 0; i < terms.size(); ++i) {
        rep.max_hermiticity_defect = std::max(rep.max_hermiticity_defect,
                                              terms[i]->hermiticity_defect(model.layout()));
        rep.max_projector_defect =
            std::max(rep.max_projector_defect, terms[i]->projector_defect(model.layout()));
        for (std::size_t k = i + 1; k < terms.size(); ++k) {
            double c = commutator_norm(model.layout(), *terms[i], *terms[k]);
            if (c > rep.max_commutator) {
                rep.max_commutator = c;
                rep.worst_pair = label(i) + " vs " + label(k);
            }
        }
    }
    rep.message = "ok";
    return rep;
}

/// Cross-family commutator norms for the superimposed Hamiltonian, reported
/// but never asserted to vanish.
struct CrossCommutatorReport {
    // rows: dual A, B, D; cols: vertex-matter A, B, C
    double matrix[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double overall_max = 0.0;
};

struct TotalHamiltonian {
    TorusLattice lattice;
    SiteLayout layout;
    std::vector<LocalOp> dual_terms;
    std::vector<LocalOp> vertex_matter_terms;
    CrossCommutatorReport cross;

    std::size_t n_terms() const { return dual_terms.size() + vertex_matter_terms.size(); }
};

/// H_total = H_dual + H_vertex on the joint edge+face+vertex layout.  Both
/// specs must agree on the gauge group and lattice.
inline TotalHamiltonian build_total_hamiltonian(const ModelSpec& dual_spec,
                                                const ModelSpec& vm_spec) {
    if (dual_spec.family == Family::VertexMatter || vm_spec.family != Family::VertexMatter)
        throw std::invalid_argument("expected (dual-or-double, vertex) spec pair");
    dual_spec.validate();
    vm_spec.validate();
    if (dual_spec.n_gauge != vm_spec.n_gauge || dual_spec.rows != vm_spec.rows ||
        dual_spec.cols != vm_spec.cols || dual_spec.convention != vm_spec.convention)
        throw std::invalid_argument("gauge group and lattice must match");

    TorusLattice lat(dual_spec.rows, dual_spec.cols, dual_spec.convention);
    SiteLayout lay = SiteLayout::joint(lat, dual_spec.n_gauge, dual_spec.matter_dim(),
                                       vm_spec.theta.m());
    TotalHamiltonian total{lat, lay, {}, {}, {}};

    std::vector<int> dual_kind, vm_kind;  // 0 = vertex, 1 = face, 2 = edge
    for (std::uint32_t v = 0; v < lat.n_vertices(); ++v) {
        total.dual_terms.push_back(build_vertex_op(lay, lat, dual_spec, v));
        dual_kind.push_back(0);
        total.vertex_matter_terms.push_back(build_vertex_op(lay, lat, vm_spec, v));
        vm_kind.push_back(0);
    }
    for (std::uint32_t p = 0; p < lat.n_faces(); ++p) {
        total.dual_terms.push_back(build_face_op(lay, lat, dual_spec, p));
        dual_kind.push_back(1);
        total.vertex_matter_terms.push_back(build_face_op(lay, lat, vm_spec, p));
        vm_kind.push_back(1);
    }
    for (std::uint32_t j = 0; j < lat.n_edges(); ++j) {
        if (dual_spec.family == Family::DualMatter) {
            total.dual_terms.push_back(build_edge_op_dual(lay, lat, dual_spec, j));
            dual_kind.push_back(2);
        }
        total.vertex_matter_terms.push_back(build_edge_comparator(lay, lat, vm_spec, j));
        vm_kind.push_back(2);
    }

    for (std::size_t i = 0; i < total.dual_terms.size(); ++i)
        for (std::size_t k = 0; k < total.vertex_matter_terms.size(); ++k) {
            double c = commutator_norm(lay, total.dual_terms[i], total.vertex_matter_terms[k]);
            auto& cell = total.cross.matrix[dual_kind[i]][vm_kind[k]];
            cell = std::max(cell, c);
            total.cross.overall_max = std::max(total.cross.overall_max, c);
        }
    return total;
}

}  // namespace qdlab
