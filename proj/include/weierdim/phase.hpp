#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "weierdim/types.hpp"

namespace weierdim {

/**
 * Exact orbit of x under t -> b t (mod 1).
 *
 * A double x has a finite binary expansion, x mod 1 = F / 2^E with integer F.
 * Then b^n x mod 1 = (b^n F mod 2^E) / 2^E, which is tracked exactly in
 * multi-limb integer arithmetic. Naive floating evaluation of b^n x loses all
 * significant bits after roughly 53 / log2(b) steps.
 */
class FractionalOrbit {
  public:
    FractionalOrbit(double x, int base) : base_(static_cast<std::uint64_t>(base))
    {
        if (base < 2) throw DomainError("orbit base must be >= 2");
        if (!std::isfinite(x)) throw DomainError("orbit start must be finite");
        double r = x - std::floor(x);
        if (r >= 1.0) r = 0.0;
        if (r == 0.0) return;
        int e = 0;
        double m = std::frexp(r, &e);  // r = m 2^e, m in [0.5, 1)
        auto mant = static_cast<std::uint64_t>(std::ldexp(m, 53));
        int bits = 53 - e;
        while ((mant & 1u) == 0 && bits > 0) {
            mant >>= 1;
            --bits;
        }
        bits_ = bits;
        limbs_.assign(static_cast<std::size_t>((bits + 63) / 64), 0);
        limbs_[0] = mant;
    }

    /// Current value in [0, 1), correctly rounded to within 2^-53.
    double value() const
    {
        if (limbs_.empty()) return 0.0;
        if (bits_ <= 64) return std::ldexp(static_cast<double>(limbs_[0]), -bits_);
        // leading 64 bits: bit positions [bits_-64, bits_)
        int const lo = bits_ - 64;
        std::size_t const li = static_cast<std::size_t>(lo / 64);
        int const sh = lo % 64;
        std::uint64_t top = limbs_[li] >> sh;
        if (sh != 0 && li + 1 < limbs_.size()) top |= limbs_[li + 1] << (64 - sh);
        return std::ldexp(static_cast<double>(top), -64);
    }

    /// Replaces the state t with b t mod 1.
    void advance()
    {
        if (limbs_.empty()) return;
        unsigned __int128 carry = 0;
        for (auto& limb : limbs_) {
            unsigned __int128 prod = static_cast<unsigned __int128>(limb) * base_ + carry;
            limb = static_cast<std::uint64_t>(prod);
            carry = prod >> 64;
        }
        int const top_bits = bits_ % 64;
        if (top_bits != 0) limbs_.back() &= (std::uint64_t{1} << top_bits) - 1;
    }

  private:
    std::uint64_t base_;
    int bits_ = 0;
    std::vector<std::uint64_t> limbs_;
};

}  // namespace weierdim
