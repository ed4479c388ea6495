#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <cstdint>
#include <vector>

#include "qdlab/groups.hpp"

using namespace qdlab;

namespace {

// Brute-force oracle: all additive maps Z_K -> Z_N, found by checking
// f(x+y) = f(x) + f(y) on every pair.  Production code never uses this.
std::vector<std::vector<std::uint32_t>> brute_force_homs(std::uint32_t k, std::uint32_t n) {
    std::vector<std::vector<std::uint32_t>> found;
    std::vector<std::uint32_t> table(k, 0);
    // every additive map is fixed by f(1), so scan all candidate values;
    // distinct f(1) can collide as maps only for K = 1, hence the dedup
    for (std::uint32_t f1 = 0; f1 < n; ++f1) {
        for (std::uint32_t x = 0; x < k; ++x) table[x] = (f1 * x) % n;
        bool ok = table[0] == 0;
        for (std::uint32_t x = 0; ok && x < k; ++x)
            for (std::uint32_t y = 0; ok && y < k; ++y)
                if ((table[x] + table[y]) % n != table[(x + y) % k]) ok = false;
        if (ok && std::find(found.begin(), found.end(), table) == found.end())
            found.push_back(table);
    }
    return found;
}

std::uint32_t brute_force_kernel(const Homomorphism& f) {
    std::uint32_t c = 0;
    for (std::uint32_t x = 0; x < f.domain_order(); ++x)
        if (f(x) == 0) ++c;
    return c;
}

std::uint32_t brute_force_image(const Homomorphism& f) {
    std::vector<bool> hit(f.codomain_order(), false);
    for (std::uint32_t x = 0; x < f.domain_order(); ++x) hit[f(x)] = true;
    std::uint32_t c = 0;
    for (bool b : hit) c += b;
    return c;
}

}  // namespace

TEST_CASE("cyclic group basics") {
    CyclicGroup z4(4);
    CHECK(z4.canon(-1) == 3);
    CHECK(z4.add(3, 2) == 1);
    CHECK(z4.neg(0) == 0);
    CHECK(z4.neg(1) == 3);
    CHECK_THROWS_AS(CyclicGroup(0), std::invalid_argument);

    GroupElement a(z4, 3), b(z4, 2);
    CHECK((a + b).value == 1);
    CHECK((-a).value == 1);
    CHECK((a + (-a)).value == 0);
}

TEST_CASE("homomorphism enumeration matches Proposition 1") {
    SECTION("worked examples") {
        auto h22 = enumerate_homomorphisms(2, 2);
        REQUIRE(h22.size() == 2);  // the two ways of building the K=N=2 model
        CHECK(h22[0].multiplier() == 0);
        CHECK(h22[1].multiplier() == 1);

        auto h32 = enumerate_homomorphisms(3, 2);  // coprime: only the trivial map
        REQUIRE(h32.size() == 1);
        CHECK(h32[0].multiplier() == 0);

        auto h24 = enumerate_homomorphisms(2, 4);
        REQUIRE(h24.size() == 2);
        CHECK(h24[0].multiplier() == 0);
        CHECK(h24[1].multiplier() == 2);
    }

    SECTION("count equals gcd and tables agree with brute force, K,N <= 8") {
        for (std::uint32_t k = 1; k <= 8; ++k)
            for (std::uint32_t n = 1; n <= 8; ++n) {
                auto homs = enumerate_homomorphisms(k, n);
                auto brute = brute_force_homs(k, n);
                REQUIRE(homs.size() == brute.size());
                CHECK(homs.size() == std::gcd(n, k));
                for (std::size_t i = 0; i < homs.size(); ++i)
                    for (std::uint32_t x = 0; x < k; ++x) CHECK(homs[i](x) == brute[i][x]);
            }
    }

    SECTION("invalid multiplier is rejected") {
        CHECK_THROWS_AS(Homomorphism(3, 2, 1), std::invalid_argument);
        CHECK_THROWS_AS(Homomorphism(2, 4, 1), std::invalid_argument);
        CHECK_THROWS_AS(Homomorphism(2, 2, 2), std::invalid_argument);  // n must be < N
    }
}

TEST_CASE("kernel, image, cokernel") {
    SECTION("stated examples") {
        CHECK(Homomorphism(3, 2, 0).kernel_order() == 3);
        CHECK(Homomorphism(2, 2, 1).kernel_order() == 1);
        CHECK(Homomorphism(4, 4, 2).kernel_order() == 2);

        CHECK(Homomorphism(2, 2, 0).image_order() == 1);
        CHECK(Homomorphism(2, 2, 0).cokernel_order() == 2);
        CHECK(Homomorphism(2, 2, 1).image_order() == 2);
        CHECK(Homomorphism(2, 2, 1).cokernel_order() == 1);
        CHECK(Homomorphism(4, 4, 2).image_order() == 2);
        CHECK(Homomorphism(4, 4, 2).cokernel_order() == 2);
    }

    SECTION("first isomorphism theorem, brute force, K <= 12") {
        for (std::uint32_t k = 1; k <= 12; ++k)
            for (std::uint32_t n = 1; n <= 12; ++n)
                for (const auto& f : enumerate_homomorphisms(k, n)) {
                    CHECK(f.kernel_order() == brute_force_kernel(f));
                    CHECK(f.image_order() == brute_force_image(f));
                    CHECK(f.kernel_order() * f.image_order() == k);
                    CHECK(f.image_order() * f.cokernel_order() == n);
                }
    }
}

TEST_CASE("ground state degeneracy formula") {
    // K = 1 reduction must give the toric-code count N^(2g).
    CHECK(gsd_formula(Homomorphism(1, 2, 0), 1) == 4);
    // faithful coupling: unique ground state on the torus
    CHECK(gsd_formula(Homomorphism(2, 2, 1), 1) == 1);
    // genus 0 keeps only the algebraic factor
    CHECK(gsd_formula(Homomorphism(2, 2, 0), 0) == 2);

    SECTION("genus-0 reduction for every valid map") {
        for (std::uint32_t k = 1; k <= 6; ++k)
            for (std::uint32_t n = 1; n <= 6; ++n)
                for (const auto& f : enumerate_homomorphisms(k, n))
                    CHECK(gsd_formula(f, 0) == f.kernel_order());
    }
}

TEST_CASE("classification by kernel and image") {
    CHECK(classify(2, 2, 0).label == ModelClass::A);
    CHECK(classify(4, 3, 0).label == ModelClass::A);
    CHECK(classify(2, 2, 1).label == ModelClass::B);
    CHECK(classify(4, 4, 2).label == ModelClass::C);
    CHECK(classify(4, 2, 2).label == ModelClass::C);
    CHECK_THROWS_WITH(classify(2, 3, 1), Catch::Matchers::ContainsSubstring("not a homomorphism"));
}

TEST_CASE("characters are orthonormal and multiplicative") {
    for (std::uint32_t n : {1u, 2u, 3u, 5u, 8u}) {
        for (std::uint32_t a = 0; a < n; ++a) {
            Character chi(n, a);
            for (std::uint32_t x = 0; x < n; ++x) {
                CHECK(std::abs(std::abs(chi(x)) - 1.0) < 1e-12);
                for (std::uint32_t y = 0; y < n; ++y)
                    CHECK(std::abs(chi((x + y) % n) - chi(x) * chi(y)) < 1e-12);
            }
            for (std::uint32_t b = 0; b < n; ++b) {
                cplx acc = 0.0;
                Character chib(n, b);
                for (std::uint32_t x = 0; x < n; ++x) acc += chi(x) * std::conj(chib(x));
                acc /= static_cast<double>(n);
                CHECK(std::abs(acc - (a == b ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("group Fourier transform") {
    SECTION("constant function is a delta at the trivial character") {
        auto fhat = fourier_transform({1.0, 1.0});
        CHECK(std::abs(fhat[0] - 2.0) < 1e-12);
        CHECK(std::abs(fhat[1]) < 1e-12);
    }
    SECTION("delta transforms to the constant") {
        auto fhat = fourier_transform({1.0, 0.0});
        CHECK(std::abs(fhat[0] - 1.0) < 1e-12);
        CHECK(std::abs(fhat[1] - 1.0) < 1e-12);
    }
    SECTION("character of the faithful Z2 coupling") {
        // fn(x) = w^(f(x)) with f = id on Z_2: fn = (1, -1)
        auto fhat = fourier_transform({1.0, -1.0});
        CHECK(std::abs(fhat[0]) < 1e-12);
        CHECK(std::abs(fhat[1] - 2.0) < 1e-12);
    }
    SECTION("inverse transform reconstructs the input") {
        std::vector<cplx> fn = {cplx(0.3, -1.0), cplx(2.0, 0.5), cplx(-1.0, 0.0),
                                cplx(0.0, 2.0), cplx(1.5, 1.5)};
        auto back = inverse_fourier_transform(fourier_transform(fn));
        for (std::size_t i = 0; i < fn.size(); ++i) CHECK(std::abs(back[i] - fn[i]) < 1e-12);
    }
}
