#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qdlab/groups.hpp"
#include "qdlab/lattice.hpp"

namespace qdlab {

using Mat = Eigen::MatrixXcd;

/**
 * @brief Tensor-product layout: one qunit per site, mixed local dimensions.
 *
 * Site order is edges in lattice order, then faces, then vertices (families
 * that lack a sector simply have zero sites there).  Basis indices are
 * little-endian: site 0 is the least significant digit.
 */
class SiteLayout {
   public:
    static SiteLayout dual(const TorusLattice& lat, std::uint32_t n_gauge,
                           std::uint32_t k_matter) {
        return SiteLayout(lat.n_edges(), n_gauge, lat.n_faces(), k_matter, 0, 1);
    }
    static SiteLayout gauge_only(const TorusLattice& lat, std::uint32_t n_gauge) {
        return SiteLayout(lat.n_edges(), n_gauge, 0, 1, 0, 1);
    }
    static SiteLayout vertex_matter(const TorusLattice& lat, std::uint32_t n_gauge,
                                    std::uint32_t m_matter) {
        return SiteLayout(lat.n_edges(), n_gauge, 0, 1, lat.n_vertices(), m_matter);
    }
    static SiteLayout joint(const TorusLattice& lat, std::uint32_t n_gauge,
                            std::uint32_t k_matter, std::uint32_t m_matter) {
        return SiteLayout(lat.n_edges(), n_gauge, lat.n_faces(), k_matter,
                          lat.n_vertices(), m_matter);
    }

    std::uint32_t n_sites() const { return static_cast<std::uint32_t>(dims_.size()); }
    std::uint32_t local_dim(std::uint32_t s) const { return dims_[s]; }
    std::uint64_t stride(std::uint32_t s) const { return strides_[s]; }
    std::uint64_t dim() const { return dim_; }

    std::uint32_t n_edges() const { return n_edges_; }
    std::uint32_t n_faces() const { return n_faces_; }
    std::uint32_t n_vertices() const { return n_vertices_; }

    std::uint32_t edge_site(std::uint32_t j) const { return j; }
    std::uint32_t face_site(std::uint32_t p) const { return n_edges_ + p; }
    std::uint32_t vertex_site(std::uint32_t v) const { return n_edges_ + n_faces_ + v; }

    std::uint32_t value_at(std::uint64_t idx, std::uint32_t s) const {
        return static_cast<std::uint32_t>((idx / strides_[s]) % dims_[s]);
    }

   private:
    SiteLayout(std::uint32_t ne, std::uint32_t de, std::uint32_t nf, std::uint32_t df,
               std::uint32_t nv, std::uint32_t dv)
        : n_edges_(ne), n_faces_(nf), n_vertices_(nv) {
        if (de == 0 || df == 0 || dv == 0)
            throw std::invalid_argument("local dimension must be >= 1");
        dims_.reserve(ne + nf + nv);
        for (std::uint32_t i = 0; i < ne; ++i) dims_.push_back(de);
        for (std::uint32_t i = 0; i < nf; ++i) dims_.push_back(df);
        for (std::uint32_t i = 0; i < nv; ++i) dims_.push_back(dv);
        strides_.resize(dims_.size());
        std::uint64_t acc = 1;
        for (std::size_t s = 0; s < dims_.size(); ++s) {
            strides_[s] = acc;
            if (acc > (std::uint64_t{1} << 62) / dims_[s])
                throw std::invalid_argument("state space dimension overflows 2^62");
            acc *= dims_[s];
        }
        dim_ = acc;
    }

    std::vector<std::uint32_t> dims_;
    std::vector<std::uint64_t> strides_;
    std::uint64_t dim_ = 1;
    std::uint32_t n_edges_, n_faces_, n_vertices_;
};

/// Hash-sparse state vector keyed by basis index.
class SparseVec {
   public:
    using Map = std::unordered_map<std::uint64_t, cplx>;

    SparseVec() = default;
    static SparseVec basis_state(std::uint64_t idx) {
        SparseVec v;
        v.amp_[idx] = 1.0;
        return v;
    }

    Map& amplitudes() { return amp_; }
    const Map& amplitudes() const { return amp_; }
    std::size_t size() const { return amp_.size(); }

    void add(std::uint64_t idx, cplx a) { amp_[idx] += a; }

    double norm() const {
        double n2 = 0;
        for (const auto& [i, a] : amp_) n2 += std::norm(a);
        return std::sqrt(n2);
    }

    void scale(cplx c) {
        for (auto& [i, a] : amp_) a *= c;
    }

    void normalize() {
        double n = norm();
        if (n < 1e-300) throw std::runtime_error("cannot normalize a zero vector");
        scale(1.0 / n);
    }

    void prune(double eps = 0.0) {
        for (auto it = amp_.begin(); it != amp_.end();)
            it = (std::abs(it->second) <= eps) ? amp_.erase(it) : std::next(it);
    }

    friend cplx inner(const SparseVec& a, const SparseVec& b) {
        const bool a_small = a.size() <= b.size();
        const SparseVec& small = a_small ? a : b;
        const SparseVec& big = a_small ? b : a;
        cplx acc = 0.0;
        for (const auto& [i, x] : small.amp_) {
            auto it = big.amp_.find(i);
            if (it == big.amp_.end()) continue;
            acc += a_small ? std::conj(x) * it->second : std::conj(it->second) * x;
        }
        return acc;
    }

   private:
    Map amp_;
};

/**
 * @brief Sparse linear operator acting on an explicit subset of sites.
 *
 * Stored as CSC over the support subspace (little-endian over the sorted
 * support sites) with identity implied everywhere else.  Every entry caches
 * the global index offset it induces, so applying the operator to a state is
 * a decode plus an offset walk per entry.
 */
class LocalOp {
   public:
    /// Default-constructs the identity (empty support).
    LocalOp() {
        support_dim_ = 1;
        fill({{0, 0, cplx(1.0)}});
    }

    /// Scalar multiple of the identity (empty support).
    static LocalOp scalar(cplx c) {
        LocalOp op;
        op.vals_[0] = c;
        return op;
    }
    static LocalOp identity() { return LocalOp(); }

    /// One-site operator.  The matrix dimension must match the site's.
    static LocalOp single_site(const SiteLayout& lay, std::uint32_t site, const Mat& m) {
        return from_sites(lay, {{site, m}});
    }

    /// Tensor product of per-site matrices; factors repeated on one site are
    /// multiplied left to right (leftmost applied last).
    static LocalOp from_sites(const SiteLayout& lay,
                              std::vector<std::pair<std::uint32_t, Mat>> factors) {
        std::stable_sort(factors.begin(), factors.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<std::uint32_t, Mat>> merged;
        for (auto& [s, m] : factors) {
            if (s >= lay.n_sites()) throw std::invalid_argument("invalid site id");
            if (m.rows() != m.cols() || m.rows() != lay.local_dim(s))
                throw std::invalid_argument("operator dimension mismatch at site " +
                                            std::to_string(s));
            if (!merged.empty() && merged.back().first == s)
                merged.back().second = merged.back().second * m;
            else
                merged.emplace_back(s, m);
        }
        std::vector<std::uint32_t> sites;
        sites.reserve(merged.size());
        for (auto& [s, m] : merged) sites.push_back(s);
        LocalOp op = prepare(lay, sites);

        struct Nz { std::uint32_t r, c; cplx v; };
        std::vector<std::vector<Nz>> nz(merged.size());
        for (std::size_t k = 0; k < merged.size(); ++k) {
            const Mat& m = merged[k].second;
            for (long r = 0; r < m.rows(); ++r)
                for (long c = 0; c < m.cols(); ++c)
                    if (m(r, c) != cplx(0.0))
                        nz[k].push_back({static_cast<std::uint32_t>(r),
                                         static_cast<std::uint32_t>(c), m(r, c)});
        }
        std::vector<Entry> entries;
        std::vector<std::size_t> pick(merged.size(), 0);
        bool empty = false;
        for (const auto& list : nz) empty |= list.empty();
        if (!empty) {
            while (true) {
                Entry e{0, 0, 1.0};
                for (std::size_t k = 0; k < merged.size(); ++k) {
                    const Nz& f = nz[k][pick[k]];
                    e.row += static_cast<std::uint64_t>(f.r) * op.sub_strides_[k];
                    e.col += static_cast<std::uint64_t>(f.c) * op.sub_strides_[k];
                    e.val *= f.v;
                }
                entries.push_back(e);
                std::size_t k = 0;
                for (; k < merged.size(); ++k) {
                    if (++pick[k] < nz[k].size()) break;
                    pick[k] = 0;
                }
                if (k == merged.size()) break;
            }
        }
        op.fill(entries);
        return op;
    }

    /// Diagonal operator from a function of the support values.
    static LocalOp diagonal(const SiteLayout& lay, std::vector<std::uint32_t> sites,
                            const std::function<cplx(const std::vector<std::uint32_t>&)>& fn) {
        std::sort(sites.begin(), sites.end());
        LocalOp op = prepare(lay, sites);
        std::vector<Entry> entries;
        std::vector<std::uint32_t> v(sites.size());
        for (std::uint64_t r = 0; r < op.support_dim_; ++r) {
            op.decode_support(r, v);
            cplx d = fn(v);
            if (d != cplx(0.0)) entries.push_back({r, r, d});
        }
        op.fill(entries);
        return op;
    }

    /// Generalized permutation: fn rewrites the value tuple in place and
    /// returns an amplitude (return 0 to drop the column).
    static LocalOp permutation(const SiteLayout& lay, std::vector<std::uint32_t> sites,
                               const std::function<cplx(std::vector<std::uint32_t>&)>& fn) {
        std::sort(sites.begin(), sites.end());
        LocalOp op = prepare(lay, sites);
        std::vector<Entry> entries;
        std::vector<std::uint32_t> v(sites.size());
        for (std::uint64_t c = 0; c < op.support_dim_; ++c) {
            op.decode_support(c, v);
            cplx a = fn(v);
            if (a != cplx(0.0)) entries.push_back({op.encode_support(v), c, a});
        }
        op.fill(entries);
        return op;
    }

    const std::vector<std::uint32_t>& sites() const { return sites_; }
    std::uint64_t support_dim() const { return support_dim_; }
    std::size_t nnz() const { return vals_.size(); }

    bool same_support(const LocalOp& o) const { return sites_ == o.sites_; }

    bool disjoint_from(const LocalOp& o) const {
        std::size_t i = 0, k = 0;
        while (i < sites_.size() && k < o.sites_.size()) {
            if (sites_[i] == o.sites_[k]) return false;
            (sites_[i] < o.sites_[k]) ? ++i : ++k;
        }
        return true;
    }

    bool is_diagonal() const {
        for (std::size_t e = 0; e < vals_.size(); ++e)
            if (rows_[e] != cols_from_ptr(e)) return false;
        return true;
    }

    /// Widens the support to a superset of sites (identity on the rest).
    LocalOp promoted(const SiteLayout& lay, const std::vector<std::uint32_t>& new_sites) const {
        for (std::uint32_t s : sites_)
            if (!std::binary_search(new_sites.begin(), new_sites.end(), s))
                throw std::invalid_argument("promotion target must contain the support");
        LocalOp out = prepare(lay, new_sites);
        if (out.support_dim_ > (std::uint64_t{1} << 31))
            throw std::invalid_argument("promoted support too large");
        std::vector<std::uint64_t> keep_stride;
        std::vector<std::uint64_t> comp_stride;
        std::vector<std::uint32_t> comp_dim;
        for (std::size_t k = 0; k < new_sites.size(); ++k) {
            if (std::binary_search(sites_.begin(), sites_.end(), new_sites[k]))
                keep_stride.push_back(out.sub_strides_[k]);
            else {
                comp_stride.push_back(out.sub_strides_[k]);
                comp_dim.push_back(lay.local_dim(new_sites[k]));
            }
        }
        std::uint64_t comp_total = 1;
        for (std::uint32_t d : comp_dim) comp_total *= d;

        std::vector<Entry> entries;
        entries.reserve(nnz() * comp_total);
        std::vector<std::uint32_t> rv(sites_.size()), cv(sites_.size());
        for (std::size_t e = 0; e < vals_.size(); ++e) {
            decode_support(rows_[e], rv);
            decode_support(cols_from_ptr(e), cv);
            std::uint64_t rbase = 0, cbase = 0;
            for (std::size_t k = 0; k < sites_.size(); ++k) {
                rbase += static_cast<std::uint64_t>(rv[k]) * keep_stride[k];
                cbase += static_cast<std::uint64_t>(cv[k]) * keep_stride[k];
            }
            for (std::uint64_t t = 0; t < comp_total; ++t) {
                std::uint64_t extra = 0, tt = t;
                for (std::size_t k = 0; k < comp_dim.size(); ++k) {
                    extra += (tt % comp_dim[k]) * comp_stride[k];
                    tt /= comp_dim[k];
                }
                entries.push_back({rbase + extra, cbase + extra, vals_[e]});
            }
        }
        out.fill(entries);
        return out;
    }

    LocalOp scaled(cplx c) const {
        LocalOp out = *this;
        for (auto& v : out.vals_) v *= c;
        return out;
    }

    LocalOp adjoint() const {
        LocalOp out = shell();
        std::vector<Entry> entries;
        entries.reserve(nnz());
        for (std::size_t e = 0; e < vals_.size(); ++e)
            entries.push_back({cols_from_ptr(e), rows_[e], std::conj(vals_[e])});
        out.fill(entries);
        return out;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& v : vals_) m = std::max(m, std::abs(v));
        return m;
    }

    friend LocalOp add(const SiteLayout& lay, const LocalOp& a, const LocalOp& b) {
        auto [pa, pb] = aligned(lay, a, b);
        std::vector<Entry> entries;
        entries.reserve(pa.nnz() + pb.nnz());
        for (std::size_t e = 0; e < pa.vals_.size(); ++e)
            entries.push_back({pa.rows_[e], pa.cols_from_ptr(e), pa.vals_[e]});
        for (std::size_t e = 0; e < pb.vals_.size(); ++e)
            entries.push_back({pb.rows_[e], pb.cols_from_ptr(e), pb.vals_[e]});
        LocalOp out = pa.shell();
        out.fill(entries);
        return out;
    }

    friend LocalOp compose(const SiteLayout& lay, const LocalOp& a, const LocalOp& b) {
        auto [pa, pb] = aligned(lay, a, b);
        return multiply_same_support(pa, pb);
    }

    /// max |A - B| entrywise over the union support (zero iff equal).
    friend double diff_norm(const SiteLayout& lay, const LocalOp& a, const LocalOp& b) {
        return add(lay, a, b.scaled(-1.0)).max_abs();
    }

    /// max-absolute-entry norm of [A, B] over the union support.  Disjoint
    /// supports and diagonal pairs commute exactly and short-circuit.
    friend double commutator_norm(const SiteLayout& lay, const LocalOp& a, const LocalOp& b) {
        if (a.disjoint_from(b)) return 0.0;
        if (a.is_diagonal() && b.is_diagonal()) return 0.0;
        auto [pa, pb] = aligned(lay, a, b);
        LocalOp ab = multiply_same_support(pa, pb);
        LocalOp ba = multiply_same_support(pb, pa);
        return diff_norm(lay, ab, ba);
    }

    double hermiticity_defect(const SiteLayout& lay) const {
        return diff_norm(lay, *this, adjoint());
    }

    /// max |P^2 - P|.
    double projector_defect(const SiteLayout& lay) const {
        return diff_norm(lay, multiply_same_support(*this, *this), *this);
    }

    SparseVec apply(const SparseVec& in) const {
        SparseVec out;
        out.amplitudes().reserve(in.size() * 2);
        std::vector<std::uint32_t> scratch(sites_.size());
        for (const auto& [idx, amp] : in.amplitudes()) {
            std::uint64_t col = support_index(idx, scratch);
            for (std::uint64_t e = col_ptr_[col]; e < col_ptr_[col + 1]; ++e)
                out.add(static_cast<std::uint64_t>(static_cast<std::int64_t>(idx) + deltas_[e]),
                        vals_[e] * amp);
        }
        return out;
    }

    /// Streams the image of one basis state: emit(target index, amplitude).
    /// scratch must hold at least sites().size() slots.
    template <class Fn>
    void for_each_from(std::uint64_t idx, std::vector<std::uint32_t>& scratch, Fn&& emit) const {
        if (scratch.size() < sites_.size()) scratch.resize(sites_.size());
        std::uint64_t col = support_index(idx, scratch);
        for (std::uint64_t e = col_ptr_[col]; e < col_ptr_[col + 1]; ++e)
            emit(static_cast<std::uint64_t>(static_cast<std::int64_t>(idx) + deltas_[e]),
                 vals_[e]);
    }

    cplx expectation(const SparseVec& psi) const { return inner(psi, apply(psi)); }

    /// Dense matrix on the support subspace.
    Mat to_dense_support() const {
        if (support_dim_ > (1u << 14))
            throw std::invalid_argument("support too large for dense conversion");
        Mat m = Mat::Zero(static_cast<long>(support_dim_), static_cast<long>(support_dim_));
        for (std::size_t e = 0; e < vals_.size(); ++e)
            m(static_cast<long>(rows_[e]), static_cast<long>(cols_from_ptr(e))) += vals_[e];
        return m;
    }

    /// Adds this operator (times coeff) into a dense full-space matrix.
    void add_to_dense_full(const SiteLayout& lay, Mat& h, cplx coeff) const {
        std::vector<std::uint32_t> scratch(sites_.size());
        for (std::uint64_t idx = 0; idx < lay.dim(); ++idx) {
            std::uint64_t col = support_index(idx, scratch);
            for (std::uint64_t e = col_ptr_[col]; e < col_ptr_[col + 1]; ++e) {
                auto out = static_cast<std::uint64_t>(static_cast<std::int64_t>(idx) + deltas_[e]);
                h(static_cast<long>(out), static_cast<long>(idx)) += coeff * vals_[e];
            }
        }
    }

    std::uint64_t support_index(std::uint64_t idx, std::vector<std::uint32_t>& scratch) const {
        std::uint64_t r = 0;
        for (std::size_t k = 0; k < sites_.size(); ++k) {
            auto v = static_cast<std::uint32_t>((idx / strides_[k]) % dims_[k]);
            scratch[k] = v;
            r += static_cast<std::uint64_t>(v) * sub_strides_[k];
        }
        return r;
    }

    void decode_support(std::uint64_t r, std::vector<std::uint32_t>& out) const {
        for (std::size_t k = 0; k < sites_.size(); ++k)
            out[k] = static_cast<std::uint32_t>((r / sub_strides_[k]) % dims_[k]);
    }
    std::uint64_t encode_support(const std::vector<std::uint32_t>& v) const {
        std::uint64_t r = 0;
        for (std::size_t k = 0; k < sites_.size(); ++k)
            r += static_cast<std::uint64_t>(v[k]) * sub_strides_[k];
        return r;
    }

   private:
    struct Entry {
        std::uint64_t row, col;
        cplx val;
    };

    static LocalOp prepare(const SiteLayout& lay, const std::vector<std::uint32_t>& sites) {
        for (std::size_t k = 1; k < sites.size(); ++k)
            if (sites[k] == sites[k - 1]) throw std::invalid_argument("duplicate support site");
        LocalOp op;
        op.sites_ = sites;
        op.dims_.clear();
        op.strides_.clear();
        op.sub_strides_.clear();
        std::uint64_t acc = 1;
        for (std::uint32_t s : sites) {
            if (s >= lay.n_sites()) throw std::invalid_argument("invalid site id");
            op.dims_.push_back(lay.local_dim(s));
            op.strides_.push_back(lay.stride(s));
            op.sub_strides_.push_back(acc);
            acc *= lay.local_dim(s);
        }
        op.support_dim_ = acc;
        op.rows_.clear();
        op.col_ptr_.clear();
        op.vals_.clear();
        op.deltas_.clear();
        return op;
    }

    LocalOp shell() const {
        LocalOp op;
        op.sites_ = sites_;
        op.dims_ = dims_;
        op.strides_ = strides_;
        op.sub_strides_ = sub_strides_;
        op.support_dim_ = support_dim_;
        op.rows_.clear();
        op.col_ptr_.clear();
        op.vals_.clear();
        op.deltas_.clear();
        return op;
    }

    /// Builds the CSC arrays (and per-entry global offsets) from triplets,
    /// merging duplicates.
    void fill(const std::vector<Entry>& entries) {
        col_ptr_.assign(support_dim_ + 1, 0);
        for (const Entry& e : entries) ++col_ptr_[e.col + 1];
        for (std::size_t i = 1; i < col_ptr_.size(); ++i) col_ptr_[i] += col_ptr_[i - 1];
        std::vector<std::uint64_t> r_tmp(entries.size());
        std::vector<cplx> v_tmp(entries.size());
        {
            std::vector<std::uint64_t> cursor(col_ptr_.begin(), col_ptr_.end() - 1);
            for (const Entry& e : entries) {
                std::uint64_t pos = cursor[e.col]++;
                r_tmp[pos] = e.row;
                v_tmp[pos] = e.val;
            }
        }
        rows_.clear();
        vals_.clear();
        rows_.reserve(entries.size());
        vals_.reserve(entries.size());
        std::vector<std::pair<std::uint64_t, cplx>> buf;
        std::vector<std::uint64_t> new_ptr(support_dim_ + 1, 0);
        for (std::uint64_t c = 0; c < support_dim_; ++c) {
            buf.clear();
            for (std::uint64_t i = col_ptr_[c]; i < col_ptr_[c + 1]; ++i)
                buf.emplace_back(r_tmp[i], v_tmp[i]);
            std::sort(buf.begin(), buf.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t i = 0; i < buf.size(); ++i) {
                if (i > 0 && buf[i].first == buf[i - 1].first)
                    vals_.back() += buf[i].second;
                else {
                    rows_.push_back(buf[i].first);
                    vals_.push_back(buf[i].second);
                }
            }
            new_ptr[c + 1] = rows_.size();
        }
        col_ptr_ = std::move(new_ptr);

        deltas_.resize(vals_.size());
        std::vector<std::uint32_t> rv(sites_.size()), cv(sites_.size());
        for (std::uint64_t c = 0; c < support_dim_; ++c) {
            decode_support(c, cv);
            for (std::uint64_t e = col_ptr_[c]; e < col_ptr_[c + 1]; ++e) {
                decode_support(rows_[e], rv);
                std::int64_t d = 0;
                for (std::size_t k = 0; k < sites_.size(); ++k)
                    d += (static_cast<std::int64_t>(rv[k]) - static_cast<std::int64_t>(cv[k])) *
                         static_cast<std::int64_t>(strides_[k]);
                deltas_[e] = d;
            }
        }
    }

    /// Column of the e-th stored entry (CSC layout).
    std::uint64_t cols_from_ptr(std::size_t e) const {
        auto it = std::upper_bound(col_ptr_.begin(), col_ptr_.end(), e);
        return static_cast<std::uint64_t>(it - col_ptr_.begin()) - 1;
    }

    static std::pair<LocalOp, LocalOp> aligned(const SiteLayout& lay, const LocalOp& a,
                                               const LocalOp& b) {
        if (a.same_support(b)) return {a, b};
        std::vector<std::uint32_t> u;
        std::set_union(a.sites_.begin(), a.sites_.end(), b.sites_.begin(), b.sites_.end(),
                       std::back_inserter(u));
        return {a.promoted(lay, u), b.promoted(lay, u)};
    }

    /// (A*B) on a shared support: column c of the product gathers A's action
    /// on each entry of B's column c.
    static LocalOp multiply_same_support(const LocalOp& a, const LocalOp& b) {
        if (!a.same_support(b)) throw std::invalid_argument("support mismatch in multiply");
        std::vector<cplx> acc(a.support_dim_, 0.0);
        std::vector<std::uint64_t> touched;
        std::vector<Entry> entries;
        for (std::uint64_t c = 0; c < b.support_dim_; ++c) {
            touched.clear();
            for (std::uint64_t eb = b.col_ptr_[c]; eb < b.col_ptr_[c + 1]; ++eb) {
                std::uint64_t k = b.rows_[eb];
                cplx bv = b.vals_[eb];
                for (std::uint64_t ea = a.col_ptr_[k]; ea < a.col_ptr_[k + 1]; ++ea) {
                    std::uint64_t r = a.rows_[ea];
                    if (acc[r] == cplx(0.0)) touched.push_back(r);
                    acc[r] += a.vals_[ea] * bv;
                }
            }
            for (std::uint64_t r : touched) {
                if (acc[r] != cplx(0.0)) entries.push_back({r, c, acc[r]});
                acc[r] = 0.0;
            }
        }
        LocalOp out = a.shell();
        out.fill(entries);
        return out;
    }

    std::vector<std::uint32_t> sites_;
    std::vector<std::uint32_t> dims_;
    std::vector<std::uint64_t> strides_;      // global stride per support site
    std::vector<std::uint64_t> sub_strides_;  // little-endian stride within support
    std::uint64_t support_dim_ = 1;

    std::vector<std::uint64_t> col_ptr_;  // CSC: size support_dim + 1
    std::vector<std::uint64_t> rows_;
    std::vector<cplx> vals_;
    std::vector<std::int64_t> deltas_;  // global index shift (row - col) per entry
};

/// Clock and shift generators on one N-dimensional site:
/// X|h> = |h+1 mod N>,  Z|h> = w^h |h>,  w = exp(2 pi i / N).
inline Mat shift_matrix(std::uint32_t n, std::int64_t power = 1) {
    Mat m = Mat::Zero(n, n);
    CyclicGroup g(n);
    for (std::uint32_t h = 0; h < n; ++h) m(g.canon(h + power), h) = 1.0;
    return m;
}

inline Mat clock_matrix(std::uint32_t n, std::int64_t power = 1) {
    Mat m = Mat::Zero(n, n);
    CyclicGroup g(n);
    for (std::uint32_t h = 0; h < n; ++h) m(h, h) = Character(n, g.canon(power))(h);
    return m;
}

inline std::pair<Mat, Mat> clock_shift(std::uint32_t n) {
    return {shift_matrix(n), clock_matrix(n)};
}

/**
 * @brief Per-site discrete-Fourier change of basis.
 *
 * Edge (gauge) sites use the plain character kernel w^(g g')/sqrt(N), matter
 * sites (faces or vertices) the conjugated one; both are unitary, so the
 * product over sites is too.  This is the basis in which the edge operator
 * becomes a diagonal comparator.
 */
class CharacterBasis {
   public:
    explicit CharacterBasis(const SiteLayout& lay) {
        site_u_.reserve(lay.n_sites());
        for (std::uint32_t s = 0; s < lay.n_sites(); ++s) {
            std::uint32_t d = lay.local_dim(s);
            Mat u(d, d);
            bool matter = s >= lay.n_edges();
            for (std::uint32_t a = 0; a < d; ++a)
                for (std::uint32_t b = 0; b < d; ++b) {
                    cplx w = Character(d, a)(b);
                    u(a, b) = (matter ? std::conj(w) : w) / std::sqrt(static_cast<double>(d));
                }
            site_u_.push_back(std::move(u));
        }
    }

    const Mat& site_unitary(std::uint32_t s) const { return site_u_[s]; }

    /// Tensor product of the site unitaries over an ascending site list,
    /// little-endian (first site least significant).
    Mat product_on(const std::vector<std::uint32_t>& sites) const {
        Mat u = Mat::Identity(1, 1);
        for (std::uint32_t s : sites) {
            const Mat& f = site_u_[s];
            Mat next(u.rows() * f.rows(), u.cols() * f.cols());
            for (long i = 0; i < f.rows(); ++i)
                for (long k = 0; k < f.cols(); ++k)
                    next.block(i * u.rows(), k * u.cols(), u.rows(), u.cols()) = f(i, k) * u;
            u = std::move(next);
        }
        return u;
    }

    /// U^dagger M U restricted to the operator's support.
    Mat conjugate_support(const LocalOp& op) const {
        Mat u = product_on(op.sites());
        return u.adjoint() * op.to_dense_support() * u;
    }

   private:
    std::vector<Mat> site_u_;
};

}  // namespace qdlab
