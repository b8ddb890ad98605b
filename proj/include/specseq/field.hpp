#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace specseq {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Prime field GF(p), p <= 2^16.  Elements are canonical residues in
/// [0, p).  Keeping p in a native word lets every product fit in 64 bits.
class fp_field {
  public:
    explicit fp_field(std::uint32_t p) : p_(p) {
        if (p < 2 || p > 65536 || !is_prime(p))
            throw error("field characteristic must be a prime <= 2^16, got " + std::to_string(p));
    }

    std::uint32_t characteristic() const { return p_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        std::uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return a >= b ? a - b : a + p_ - b; }
    std::uint32_t neg(std::uint32_t a) const { return a == 0 ? 0 : p_ - a; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        return static_cast<std::uint32_t>((std::uint64_t(a) * b) % p_);
    }
    std::uint32_t inv(std::uint32_t a) const {
        if (a == 0) throw error("division by zero in GF(" + std::to_string(p_) + ")");
        // extended Euclid on (a, p)
        std::int64_t t = 0, new_t = 1, r = p_, new_r = a;
        while (new_r != 0) {
            std::int64_t q = r / new_r;
            std::int64_t tmp = t - q * new_t;
            t = new_t;
            new_t = tmp;
            tmp = r - q * new_r;
            r = new_r;
            new_r = tmp;
        }
        if (t < 0) t += p_;
        return static_cast<std::uint32_t>(t);
    }
    std::uint32_t div(std::uint32_t a, std::uint32_t b) const { return mul(a, inv(b)); }

    /// Canonical residue of an arbitrary signed value.
    std::uint32_t reduce(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(p_);
        if (r < 0) r += p_;
        return static_cast<std::uint32_t>(r);
    }

    bool operator==(const fp_field& o) const { return p_ == o.p_; }
    bool operator!=(const fp_field& o) const { return p_ != o.p_; }

    static bool is_prime(std::uint32_t n) {
        if (n < 2) return false;
        for (std::uint32_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

  private:
    std::uint32_t p_;
};

} // namespace specseq
