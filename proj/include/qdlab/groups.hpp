#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/**
 * @brief Finite cyclic group Z_n with canonical representatives in [0, n).
 */
class CyclicGroup {
   public:
    explicit CyclicGroup(std::uint32_t order) : order_(order) {
        if (order == 0) throw std::invalid_argument("cyclic group order must be >= 1");
    }

    std::uint32_t order() const { return order_; }

    std::uint32_t canon(std::int64_t x) const {
        std::int64_t m = x % static_cast<std::int64_t>(order_);
        if (m < 0) m += order_;
        return static_cast<std::uint32_t>(m);
    }
    std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return (a + b) % order_; }
    std::uint32_t neg(std::uint32_t a) const { return a == 0 ? 0 : order_ - a; }

    bool operator==(const CyclicGroup& o) const { return order_ == o.order_; }

   private:
    std::uint32_t order_;
};

/// A group element carrying its parent group; value is always canonical.
struct GroupElement {
    CyclicGroup group;
    std::uint32_t value;

    GroupElement(CyclicGroup g, std::int64_t v) : group(g), value(g.canon(v)) {}

    GroupElement operator+(const GroupElement& o) const {
        require_same_group(o);
        return GroupElement(group, group.add(value, o.value));
    }
    GroupElement operator-() const { return GroupElement(group, group.neg(value)); }
    bool operator==(const GroupElement& o) const {
        return group == o.group && value == o.value;
    }

   private:
    void require_same_group(const GroupElement& o) const {
        if (!(group == o.group)) throw std::invalid_argument("group mismatch");
    }
};

/**
 * @brief Additive homomorphism f : Z_K -> Z_N, f(x) = n*x mod N.
 *
 * A multiplier n < N is admissible exactly when N divides n*K; the default
 * constructor checks this and rejects anything else.
 */
class Homomorphism {
   public:
    Homomorphism(std::uint32_t domain_order, std::uint32_t codomain_order,
                 std::uint32_t multiplier)
        : k_(domain_order), n_(codomain_order), mult_(multiplier) {
        if (k_ == 0 || n_ == 0) throw std::invalid_argument("group order must be >= 1");
        if (!is_valid_multiplier(k_, n_, mult_))
            throw std::invalid_argument("not a homomorphism: Z_" + std::to_string(k_) +
                                        " -> Z_" + std::to_string(n_) + " with n=" +
                                        std::to_string(mult_));
    }

    static bool is_valid_multiplier(std::uint32_t k, std::uint32_t n, std::uint32_t mult) {
        if (mult >= n) return false;
        return (static_cast<std::uint64_t>(mult) * k) % n == 0;
    }

    std::uint32_t domain_order() const { return k_; }
    std::uint32_t codomain_order() const { return n_; }
    std::uint32_t multiplier() const { return mult_; }

    std::uint32_t operator()(std::uint32_t x) const {
        return static_cast<std::uint32_t>((static_cast<std::uint64_t>(mult_) * (x % k_)) % n_);
    }

    bool is_trivial() const { return mult_ == 0; }

    /// |ker f| = K * gcd(n, N) / N.  gcd(0, N) = N, so the trivial map gives K.
    std::uint32_t kernel_order() const {
        std::uint32_t d = std::gcd(mult_, n_);
        return static_cast<std::uint32_t>((static_cast<std::uint64_t>(k_) * d) / n_);
    }
    std::uint32_t image_order() const { return k_ / kernel_order(); }
    std::uint32_t cokernel_order() const { return n_ / image_order(); }

   private:
    std::uint32_t k_, n_, mult_;
};

/// All homomorphisms Z_K -> Z_N, sorted by multiplier; there are gcd(N, K).
inline std::vector<Homomorphism> enumerate_homomorphisms(std::uint32_t k, std::uint32_t n) {
    if (k == 0 || n == 0) throw std::invalid_argument("group order must be >= 1");
    std::vector<Homomorphism> out;
    for (std::uint32_t m = 0; m < n; ++m)
        if (Homomorphism::is_valid_multiplier(k, n, m)) out.emplace_back(k, n, m);
    return out;
}

/**
 * @brief Ground-state degeneracy |ker f| * |coker f|^(2*genus).
 *
 * The cokernel is taken as the quotient of the codomain by the image, which
 * reproduces the toric-code count N^(2g) in the K = 1 limit.
 */
inline std::uint64_t gsd_formula(const Homomorphism& f, std::uint32_t genus) {
    std::uint64_t d = f.kernel_order();
    std::uint64_t c = f.cokernel_order();
    for (std::uint32_t i = 0; i < 2 * genus; ++i) d *= c;
    return d;
}

enum class ModelClass { A, B, C };

inline const char* to_string(ModelClass c) {
    switch (c) {
        case ModelClass::A: return "A";
        case ModelClass::B: return "B";
        default: return "C";
    }
}

struct Classification {
    ModelClass label;
    std::uint32_t kernel, image, cokernel;
    std::string descriptor;
};

/**
 * @brief Classify the coupling (N, K, n) by the computed kernel/image of f.
 *
 * A: trivial f (maximal algebraic degeneracy).  B: f bijective onto Z_N
 * (minimal degeneracy, fully confined e-sector).  C: everything in between.
 */
inline Classification classify(std::uint32_t n_gauge, std::uint32_t k_matter,
                               std::uint32_t multiplier) {
    Homomorphism f(k_matter, n_gauge, multiplier);  // throws "not a homomorphism"
    Classification c;
    c.kernel = f.kernel_order();
    c.image = f.image_order();
    c.cokernel = f.cokernel_order();
    if (f.is_trivial())
        c.label = ModelClass::A;
    else if (c.kernel == 1 && c.image == n_gauge)
        c.label = ModelClass::B;
    else
        c.label = ModelClass::C;
    c.descriptor = std::string(to_string(c.label)) + ": ker=" + std::to_string(c.kernel) +
                   " im=" + std::to_string(c.image) + " coker=" + std::to_string(c.cokernel);
    return c;
}

/**
 * @brief Character chi_label of Z_order: chi(x) = exp(2*pi*i*label*x/order).
 */
class Character {
   public:
    Character(std::uint32_t order, std::uint32_t label)
        : order_(order), label_(label % order) {
        if (order == 0) throw std::invalid_argument("cyclic group order must be >= 1");
    }

    std::uint32_t order() const { return order_; }
    std::uint32_t label() const { return label_; }

    cplx operator()(std::uint32_t x) const {
        double arg = 2.0 * kPi * static_cast<double>(label_) *
                     static_cast<double>(x % order_) / static_cast<double>(order_);
        return {std::cos(arg), std::sin(arg)};
    }

   private:
    std::uint32_t order_, label_;
};

/// Unnormalized group Fourier transform: fhat(chi_g) = sum_x fn(x) chi_g(x).
inline std::vector<cplx> fourier_transform(const std::vector<cplx>& fn) {
    const auto k = static_cast<std::uint32_t>(fn.size());
    if (k == 0) throw std::invalid_argument("empty function");
    std::vector<cplx> out(k);
    for (std::uint32_t g = 0; g < k; ++g) {
        Character chi(k, g);
        cplx acc = 0.0;
        for (std::uint32_t x = 0; x < k; ++x) acc += fn[x] * chi(x);
        out[g] = acc;
    }
    return out;
}

/// Inverse transform: fn(x) = (1/|S|) sum_g fhat(chi_g) conj(chi_g(x)).
inline std::vector<cplx> inverse_fourier_transform(const std::vector<cplx>& fhat) {
    const auto k = static_cast<std::uint32_t>(fhat.size());
    if (k == 0) throw std::invalid_argument("empty function");
    std::vector<cplx> out(k);
    for (std::uint32_t x = 0; x < k; ++x) {
        cplx acc = 0.0;
        for (std::uint32_t g = 0; g < k; ++g) acc += fhat[g] * std::conj(Character(k, g)(x));
        out[x] = acc / static_cast<double>(k);
    }
    return out;
}

}  // namespace qdlab
