#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qdlab {

enum class Axis : std::uint8_t { Horizontal, Vertical };

enum class Direction : std::uint8_t { East, North, West, South };

/// Which of the two adjacent faces sits on which side of an edge.  Standard
/// puts p1 on the left of the edge's direction of travel; Swapped flips it.
enum class FaceConvention : std::uint8_t { Standard, Swapped };

struct EdgeRef {
    std::uint32_t id;
    Axis axis;
    std::uint32_t row, col;  // base vertex (tail of the oriented edge)
};

/// The four star edges of a vertex.  Roles a (north) and b (east) point away
/// from the vertex, c (south) and d (west) point into it.
struct StarIncidence {
    std::uint32_t a, b, c, d;
    std::array<std::uint32_t, 4> edges() const { return {a, b, c, d}; }
    static constexpr std::array<bool, 4> outgoing() { return {true, true, false, false}; }
};

/// The four boundary edges of a face: r (top), s (right), t (bottom),
/// u (left).  sign() is the coefficient of each edge in the oriented
/// boundary word r - s - t + u.
struct BoundaryIncidence {
    std::uint32_t r, s, t, u;
    std::array<std::uint32_t, 4> edges() const { return {r, s, t, u}; }
    static constexpr std::array<int, 4> sign() { return {+1, -1, -1, +1}; }
};

struct EdgeFaces {
    std::uint32_t p1, p2;
};

struct PathStep {
    std::uint32_t edge;
    int sign;  // +1 with the edge orientation, -1 against
};

using Path = std::vector<PathStep>;
using DualPath = std::vector<PathStep>;

/**
 * @brief Oriented square lattice on the torus.
 *
 * Horizontal edges point east (+x), vertical edges point north (+y).  Faces
 * are indexed by their southwest corner vertex.  Rows and columns both wrap.
 * A 1-wide torus would make the four star slots collide, so 2x2 is the
 * smallest admissible lattice.
 */
class TorusLattice {
   public:
    TorusLattice(std::uint32_t rows, std::uint32_t cols,
                 FaceConvention conv = FaceConvention::Standard)
        : rows_(rows), cols_(cols), conv_(conv) {
        if (rows < 2 || cols < 2) throw std::invalid_argument("degenerate lattice");
    }

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }
    FaceConvention convention() const { return conv_; }

    std::uint32_t n_vertices() const { return rows_ * cols_; }
    std::uint32_t n_edges() const { return 2 * rows_ * cols_; }
    std::uint32_t n_faces() const { return rows_ * cols_; }

    std::uint32_t vertex(std::uint32_t r, std::uint32_t c) const {
        return (r % rows_) * cols_ + (c % cols_);
    }
    std::uint32_t face(std::uint32_t r, std::uint32_t c) const { return vertex(r, c); }
    std::uint32_t h_edge(std::uint32_t r, std::uint32_t c) const {
        return 2 * vertex(r, c);
    }
    std::uint32_t v_edge(std::uint32_t r, std::uint32_t c) const {
        return 2 * vertex(r, c) + 1;
    }

    EdgeRef edge_ref(std::uint32_t j) const {
        check_edge(j);
        EdgeRef e;
        e.id = j;
        e.axis = (j % 2 == 0) ? Axis::Horizontal : Axis::Vertical;
        e.row = (j / 2) / cols_;
        e.col = (j / 2) % cols_;
        return e;
    }

    StarIncidence vertex_star(std::uint32_t v) const {
        check_vertex(v);
        std::uint32_t r = v / cols_, c = v % cols_;
        StarIncidence s;
        s.a = v_edge(r, c);
        s.b = h_edge(r, c);
        s.c = v_edge(r + rows_ - 1, c);
        s.d = h_edge(r, c + cols_ - 1);
        return s;
    }

    BoundaryIncidence face_boundary(std::uint32_t p) const {
        check_face(p);
        std::uint32_t r = p / cols_, c = p % cols_;
        BoundaryIncidence b;
        b.r = h_edge(r + 1, c);
        b.s = v_edge(r, c + 1);
        b.t = h_edge(r, c);
        b.u = v_edge(r, c);
        return b;
    }

    /// Faces adjacent to edge j.  Standard convention: p1 is on the left of
    /// the direction of travel (north of a horizontal edge, west of a
    /// vertical one), p2 on the right.
    EdgeFaces edge_faces(std::uint32_t j) const {
        EdgeRef e = edge_ref(j);
        EdgeFaces f;
        if (e.axis == Axis::Horizontal) {
            f.p1 = face(e.row, e.col);
            f.p2 = face(e.row + rows_ - 1, e.col);
        } else {
            f.p1 = face(e.row, e.col + cols_ - 1);
            f.p2 = face(e.row, e.col);
        }
        if (conv_ == FaceConvention::Swapped) std::swap(f.p1, f.p2);
        return f;
    }

    /// Coefficient of edge j in the boundary word of face p: +1 when p = p2,
    /// -1 when p = p1 (matches BoundaryIncidence::sign on the roles).
    int boundary_sign(std::uint32_t p, std::uint32_t j) const {
        EdgeFaces f = edge_faces(j);
        if (p == f.p2) return +1;
        if (p == f.p1) return -1;
        throw std::invalid_argument("edge does not bound this face");
    }

    /// Straight primal path from a start vertex; consecutive edges share a
    /// vertex.  Signs record traversal with (+) or against (-) orientation.
    Path straight_path(std::uint32_t start_vertex, Direction dir, std::uint32_t length) const {
        check_vertex(start_vertex);
        if (length == 0) return {};
        std::uint32_t r = start_vertex / cols_, c = start_vertex % cols_;
        Path path;
        path.reserve(length);
        for (std::uint32_t i = 0; i < length; ++i) {
            switch (dir) {
                case Direction::East: path.push_back({h_edge(r, c), +1}); c = (c + 1) % cols_; break;
                case Direction::West: c = (c + cols_ - 1) % cols_; path.push_back({h_edge(r, c), -1}); break;
                case Direction::North: path.push_back({v_edge(r, c), +1}); r = (r + 1) % rows_; break;
                case Direction::South: r = (r + rows_ - 1) % rows_; path.push_back({v_edge(r, c), -1}); break;
            }
        }
        return path;
    }

    /// Straight dual path from a start face; consecutive edges bound a common
    /// face.  Sign +1 when the walk crosses the edge from its p1 side.
    DualPath straight_dual_path(std::uint32_t start_face, Direction dir,
                                std::uint32_t length) const {
        check_face(start_face);
        std::uint32_t r = start_face / cols_, c = start_face % cols_;
        DualPath path;
        path.reserve(length);
        for (std::uint32_t i = 0; i < length; ++i) {
            std::uint32_t cur = face(r, c);
            std::uint32_t j = 0;
            switch (dir) {
                case Direction::East: j = v_edge(r, c + 1); c = (c + 1) % cols_; break;
                case Direction::West: j = v_edge(r, c); c = (c + cols_ - 1) % cols_; break;
                case Direction::North: j = h_edge(r + 1, c); r = (r + 1) % rows_; break;
                case Direction::South: j = h_edge(r, c); r = (r + rows_ - 1) % rows_; break;
            }
            EdgeFaces f = edge_faces(j);
            path.push_back({j, f.p1 == cur ? +1 : -1});
        }
        return path;
    }

    /// The two endpoint vertices of an edge (tail, head).
    std::pair<std::uint32_t, std::uint32_t> edge_vertices(std::uint32_t j) const {
        EdgeRef e = edge_ref(j);
        std::uint32_t tail = vertex(e.row, e.col);
        std::uint32_t head = (e.axis == Axis::Horizontal) ? vertex(e.row, e.col + 1)
                                                          : vertex(e.row + 1, e.col);
        return {tail, head};
    }

    bool is_primal_path(const Path& path) const {
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            auto [a0, a1] = edge_vertices(path[i].edge);
            auto [b0, b1] = edge_vertices(path[i + 1].edge);
            if (a0 != b0 && a0 != b1 && a1 != b0 && a1 != b1) return false;
        }
        return true;
    }

    bool is_dual_path(const DualPath& path) const {
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            EdgeFaces a = edge_faces(path[i].edge);
            EdgeFaces b = edge_faces(path[i + 1].edge);
            if (a.p1 != b.p1 && a.p1 != b.p2 && a.p2 != b.p1 && a.p2 != b.p2) return false;
        }
        return true;
    }

   private:
    void check_vertex(std::uint32_t v) const {
        if (v >= n_vertices()) throw std::invalid_argument("invalid vertex id");
    }
    void check_face(std::uint32_t p) const {
        if (p >= n_faces()) throw std::invalid_argument("invalid face id");
    }
    void check_edge(std::uint32_t j) const {
        if (j >= n_edges()) throw std::invalid_argument("invalid edge id");
    }

    std::uint32_t rows_, cols_;
    FaceConvention conv_;
};

}  // namespace qdlab
