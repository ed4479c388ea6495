#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "qdlab/lattice.hpp"

using namespace qdlab;

TEST_CASE("torus counting and Euler characteristic") {
    TorusLattice l22(2, 2);
    CHECK(l22.n_vertices() == 4);
    CHECK(l22.n_edges() == 8);
    CHECK(l22.n_faces() == 4);

    TorusLattice l23(2, 3);
    CHECK(l23.n_vertices() == 6);
    CHECK(l23.n_edges() == 12);
    CHECK(l23.n_faces() == 6);

    for (std::uint32_t r = 2; r <= 5; ++r)
        for (std::uint32_t c = 2; c <= 5; ++c) {
            TorusLattice l(r, c);
            CHECK(static_cast<int>(l.n_vertices()) - static_cast<int>(l.n_edges()) +
                      static_cast<int>(l.n_faces()) ==
                  0);
        }

    CHECK_THROWS_WITH(TorusLattice(1, 4), Catch::Matchers::ContainsSubstring("degenerate"));
    CHECK_THROWS_WITH(TorusLattice(3, 1), Catch::Matchers::ContainsSubstring("degenerate"));
}

TEST_CASE("stars: four distinct edges, each edge in exactly two stars") {
    for (auto [r, c] : {std::pair{2u, 2u}, {2u, 3u}, {3u, 3u}}) {
        TorusLattice lat(r, c);
        std::map<std::uint32_t, int> outgoing, incoming;
        for (std::uint32_t v = 0; v < lat.n_vertices(); ++v) {
            StarIncidence s = lat.vertex_star(v);
            auto edges = s.edges();
            std::set<std::uint32_t> distinct(edges.begin(), edges.end());
            CHECK(distinct.size() == 4);
            ++outgoing[s.a];
            ++outgoing[s.b];
            ++incoming[s.c];
            ++incoming[s.d];
        }
        for (std::uint32_t j = 0; j < lat.n_edges(); ++j) {
            CHECK(outgoing[j] == 1);  // once with outgoing role
            CHECK(incoming[j] == 1);  // once with incoming role
        }
        CHECK_THROWS_AS(lat.vertex_star(lat.n_vertices()), std::invalid_argument);
    }
}

TEST_CASE("face boundaries and edge-face incidence") {
    TorusLattice lat(2, 2);
    std::map<std::uint32_t, int> in_boundaries;
    for (std::uint32_t p = 0; p < lat.n_faces(); ++p) {
        BoundaryIncidence b = lat.face_boundary(p);
        auto edges = b.edges();
        std::set<std::uint32_t> distinct(edges.begin(), edges.end());
        CHECK(distinct.size() == 4);
        for (std::uint32_t j : edges) ++in_boundaries[j];
    }
    for (std::uint32_t j = 0; j < lat.n_edges(); ++j) {
        CHECK(in_boundaries[j] == 2);
        EdgeFaces f = lat.edge_faces(j);
        CHECK(f.p1 != f.p2);
    }
}

TEST_CASE("p1/p2 follow the left/right-of-travel rule") {
    TorusLattice lat(2, 2);
    // vertical edge at the origin points north; west face is on its left
    EdgeFaces f = lat.edge_faces(lat.v_edge(0, 0));
    CHECK(f.p1 == lat.face(0, 1));  // west of column 0 wraps to column 1
    CHECK(f.p2 == lat.face(0, 0));
    // horizontal edge at the origin points east; north face on its left
    EdgeFaces g = lat.edge_faces(lat.h_edge(0, 0));
    CHECK(g.p1 == lat.face(0, 0));
    CHECK(g.p2 == lat.face(1, 0));

    SECTION("swapped convention flips the pair") {
        TorusLattice swapped(2, 2, FaceConvention::Swapped);
        EdgeFaces fs = swapped.edge_faces(swapped.v_edge(0, 0));
        CHECK(fs.p1 == f.p2);
        CHECK(fs.p2 == f.p1);
    }
}

TEST_CASE("boundary signs match the role convention") {
    for (auto [rr, cc] : {std::pair{2u, 3u}, {3u, 3u}}) {
        TorusLattice lat(rr, cc);
        for (std::uint32_t p = 0; p < lat.n_faces(); ++p) {
            BoundaryIncidence b = lat.face_boundary(p);
            auto edges = b.edges();
            auto signs = BoundaryIncidence::sign();
            for (std::size_t i = 0; i < 4; ++i)
                CHECK(lat.boundary_sign(p, edges[i]) == signs[i]);
        }
    }
}

TEST_CASE("roles round-trip: every edge sees 2 stars and 2 boundaries on (2,3)") {
    TorusLattice lat(2, 3);
    for (std::uint32_t j = 0; j < lat.n_edges(); ++j) {
        int star_hits = 0, boundary_hits = 0;
        for (std::uint32_t v = 0; v < lat.n_vertices(); ++v)
            for (std::uint32_t e : lat.vertex_star(v).edges()) star_hits += (e == j);
        for (std::uint32_t p = 0; p < lat.n_faces(); ++p)
            for (std::uint32_t e : lat.face_boundary(p).edges()) boundary_hits += (e == j);
        CHECK(star_hits == 2);
        CHECK(boundary_hits == 2);
    }
}

TEST_CASE("straight paths") {
    TorusLattice lat(2, 2);

    SECTION("length L2 horizontal path closes into a non-contractible loop") {
        Path p = lat.straight_path(0, Direction::East, 2);
        REQUIRE(p.size() == 2);
        CHECK(lat.is_primal_path(p));
        // endpoints coincide: the walk returns to the start vertex
        auto [t0, h0] = lat.edge_vertices(p.front().edge);
        auto [t1, h1] = lat.edge_vertices(p.back().edge);
        CHECK(t0 == 0);
        CHECK(h1 == 0);
    }

    SECTION("length 1 is a single edge with its two endpoints") {
        Path p = lat.straight_path(0, Direction::North, 1);
        REQUIRE(p.size() == 1);
        auto [t, h] = lat.edge_vertices(p.front().edge);
        CHECK(t == 0);
        CHECK(h == lat.vertex(1, 0));
    }

    SECTION("length 0 is empty") {
        CHECK(lat.straight_path(0, Direction::East, 0).empty());
        CHECK(lat.straight_dual_path(0, Direction::East, 0).empty());
    }
}

TEST_CASE("generated paths are two-by-two adjacent, exhaustive on (3,3)") {
    TorusLattice lat(3, 3);
    for (std::uint32_t v = 0; v < lat.n_vertices(); ++v)
        for (auto dir : {Direction::East, Direction::North, Direction::West, Direction::South})
            for (std::uint32_t len = 1; len <= 4; ++len) {
                CHECK(lat.is_primal_path(lat.straight_path(v, dir, len)));
                CHECK(lat.is_dual_path(lat.straight_dual_path(v, dir, len)));
            }
}

TEST_CASE("star and boundary roles are translation invariant") {
    TorusLattice lat(3, 4);
    auto rel_star = [&](std::uint32_t r, std::uint32_t c) {
        StarIncidence s = lat.vertex_star(lat.vertex(r, c));
        return std::array<std::uint32_t, 4>{s.a == lat.v_edge(r, c), s.b == lat.h_edge(r, c),
                                            s.c == lat.v_edge(r + lat.rows() - 1, c),
                                            s.d == lat.h_edge(r, c + lat.cols() - 1)};
    };
    for (std::uint32_t r = 0; r < lat.rows(); ++r)
        for (std::uint32_t c = 0; c < lat.cols(); ++c)
            CHECK(rel_star(r, c) == std::array<std::uint32_t, 4>{1, 1, 1, 1});
}
