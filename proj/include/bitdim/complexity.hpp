#pragma once

#include <bitdim/core.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace bitdim {

// Additive constant in the length ceiling 2|w| + c that every staged
// approximation starts from.
inline constexpr std::uint64_t kCeilingSlack = 48;

// Fixed header charged by the compressor proxy on top of the model cost.
inline constexpr std::uint64_t kCompressorHeaderBits = 16;

// Default additive slack for near-subadditivity style checks.
inline constexpr std::uint64_t kAdditiveSlackBits = 128;

// floor(log2(x) * 2^24) by normalize-and-square. Pure integer arithmetic,
// identical on every platform.
inline std::uint64_t ilog2_q24(std::uint64_t x) {
    if (x == 0) throw error("ilog2_q24: log of zero");
    unsigned e = static_cast<unsigned>(std::bit_width(x) - 1);
    // mantissa in [2^32, 2^33) as Q32
    unsigned __int128 y;
    if (e <= 32)
        y = static_cast<unsigned __int128>(x) << (32 - e);
    else
        y = static_cast<unsigned __int128>(x) >> (e - 32);
    const unsigned __int128 two_q32 = static_cast<unsigned __int128>(1) << 33;
    std::uint64_t frac = 0;
    for (int i = 0; i < 24; ++i) {
        y = (y * y) >> 32;
        frac <<= 1;
        if (y >= two_q32) {
            y >>= 1;
            frac |= 1;
        }
    }
    return (static_cast<std::uint64_t>(e) << 24) | frac;
}

// Exact nonnegative rational, compared by cross multiplication. num and den
// stay below 2^63 in all uses here, so the products fit in 128 bits.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(Ratio a, Ratio b) {
        return static_cast<unsigned __int128>(a.num) * b.den == static_cast<unsigned __int128>(b.num) * a.den;
    }
    friend bool operator!=(Ratio a, Ratio b) { return !(a == b); }
    friend bool operator<(Ratio a, Ratio b) {
        return static_cast<unsigned __int128>(a.num) * b.den < static_cast<unsigned __int128>(b.num) * a.den;
    }
    friend bool operator>(Ratio a, Ratio b) { return b < a; }
    friend bool operator<=(Ratio a, Ratio b) { return !(b < a); }
    friend bool operator>=(Ratio a, Ratio b) { return !(a < b); }
};

// Order-3 binary context model with a Krichevsky-Trofimov estimator.
// Cost is accumulated in Q24 fixed point, so two streams fed the same bits
// report bit-identical costs.
class KtCostStream {
public:
    void push(int b) {
        b &= 1;
        auto& c = counts_[ctx_];
        std::uint64_t num = 2 * (b ? c[1] : c[0]) + 1;
        std::uint64_t den = 2 * (c[0] + c[1] + 1);
        cost_q24_ += ilog2_q24(den) - ilog2_q24(num);
        ++c[static_cast<std::size_t>(b)];
        ctx_ = ((ctx_ << 1) | static_cast<unsigned>(b)) & 7u;
        ++nbits_;
    }

    std::uint64_t bits_pushed() const { return nbits_; }
    std::uint64_t cost_q24() const { return cost_q24_; }
    std::uint64_t cost_bits_ceil() const { return (cost_q24_ + (1ull << 24) - 1) >> 24; }

private:
    std::array<std::array<std::uint64_t, 2>, 8> counts_{};
    unsigned ctx_ = 0;
    std::uint64_t cost_q24_ = 0;
    std::uint64_t nbits_ = 0;
};

// Upper bound every estimator starts from before any evidence is in.
inline std::uint64_t length_ceiling(std::uint64_t word_length) { return 2 * word_length + kCeilingSlack; }

// Computable stand-in for prefix complexity with a staged, nonincreasing
// approximation. Stage 0 always reports the length ceiling; stage s unlocks
// the real estimate for words of length at most s.
class Estimator {
public:
    virtual ~Estimator() = default;
    virtual std::string name() const = 0;
    virtual std::uint64_t estimate(const BitWord& w) const = 0;

    virtual std::uint64_t staged_estimate(const BitWord& w, std::uint64_t stage) const {
        std::uint64_t ceil = length_ceiling(w.size());
        if (stage >= 1 && w.size() <= stage) return std::min(estimate(w), ceil);
        return ceil;
    }

    // estimate(prefix(A, n)) for every n in [0, n_max], as one vector.
    virtual std::vector<std::uint64_t> prefix_estimates(const BitSource& a, std::uint64_t n_max) const {
        std::vector<std::uint64_t> out;
        out.reserve(static_cast<std::size_t>(n_max) + 1);
        for (std::uint64_t n = 0; n <= n_max; ++n) out.push_back(estimate(prefix(a, n)));
        return out;
    }

    // Incremental view: push bits one at a time, read the running estimate.
    // Consumers that must account for every oracle read use this instead of
    // prefix_estimates, so nothing is fetched ahead of need.
    class PrefixStream {
    public:
        virtual ~PrefixStream() = default;
        virtual void push(int bit) = 0;
        virtual std::uint64_t length() const = 0;
        virtual std::uint64_t estimate() const = 0;
    };

    virtual std::unique_ptr<PrefixStream> stream() const {
        class Buffered final : public PrefixStream {
        public:
            explicit Buffered(const Estimator& e) : est_(e) {}
            void push(int bit) override { w_.push_back(bit); }
            std::uint64_t length() const override { return w_.size(); }
            std::uint64_t estimate() const override { return est_.estimate(w_); }

        private:
            const Estimator& est_;
            BitWord w_;
        };
        return std::make_unique<Buffered>(*this);
    }
};

using EstimatorPtr = std::shared_ptr<const Estimator>;

// K-hat(w) = |w|. Every ratio is exactly 1.
class IdentityEstimator final : public Estimator {
public:
    std::string name() const override { return "identity"; }
    std::uint64_t estimate(const BitWord& w) const override { return w.size(); }
    std::vector<std::uint64_t> prefix_estimates(const BitSource&, std::uint64_t n_max) const override {
        std::vector<std::uint64_t> out(static_cast<std::size_t>(n_max) + 1);
        for (std::uint64_t n = 0; n <= n_max; ++n) out[static_cast<std::size_t>(n)] = n;
        return out;
    }
    std::unique_ptr<PrefixStream> stream() const override {
        class S final : public PrefixStream {
        public:
            void push(int) override { ++n_; }
            std::uint64_t length() const override { return n_; }
            std::uint64_t estimate() const override { return n_; }

        private:
            std::uint64_t n_ = 0;
        };
        return std::make_unique<S>();
    }
};

// K-hat(w) = 2|w| + c at every stage. Nothing ever looks compressible.
class CeilingEstimator final : public Estimator {
public:
    std::string name() const override { return "ceiling"; }
    std::uint64_t estimate(const BitWord& w) const override { return length_ceiling(w.size()); }
    std::uint64_t staged_estimate(const BitWord& w, std::uint64_t) const override {
        return length_ceiling(w.size());
    }
    std::vector<std::uint64_t> prefix_estimates(const BitSource&, std::uint64_t n_max) const override {
        std::vector<std::uint64_t> out(static_cast<std::size_t>(n_max) + 1);
        for (std::uint64_t n = 0; n <= n_max; ++n) out[static_cast<std::size_t>(n)] = length_ceiling(n);
        return out;
    }
    std::unique_ptr<PrefixStream> stream() const override {
        class S final : public PrefixStream {
        public:
            void push(int) override { ++n_; }
            std::uint64_t length() const override { return n_; }
            std::uint64_t estimate() const override { return length_ceiling(n_); }

        private:
            std::uint64_t n_ = 0;
        };
        return std::make_unique<S>();
    }
};

// Context-model compressor proxy, capped at the length ceiling so the staged
// schedule converges to it from above.
class CompressorEstimator final : public Estimator {
public:
    std::string name() const override { return "compressor"; }

    std::uint64_t estimate(const BitWord& w) const override {
        KtCostStream s;
        for (std::size_t i = 0; i < w.size(); ++i) s.push(w[i]);
        return std::min(s.cost_bits_ceil() + kCompressorHeaderBits, length_ceiling(w.size()));
    }

    std::vector<std::uint64_t> prefix_estimates(const BitSource& a, std::uint64_t n_max) const override {
        std::vector<std::uint64_t> out;
        out.reserve(static_cast<std::size_t>(n_max) + 1);
        KtCostStream s;
        out.push_back(std::min(kCompressorHeaderBits, length_ceiling(0)));
        for (std::uint64_t n = 1; n <= n_max; ++n) {
            s.push(a.bit(n - 1));
            out.push_back(std::min(s.cost_bits_ceil() + kCompressorHeaderBits, length_ceiling(n)));
        }
        return out;
    }
    std::unique_ptr<PrefixStream> stream() const override {
        class S final : public PrefixStream {
        public:
            void push(int bit) override { kt_.push(bit); }
            std::uint64_t length() const override { return kt_.bits_pushed(); }
            std::uint64_t estimate() const override {
                return std::min(kt_.cost_bits_ceil() + kCompressorHeaderBits, length_ceiling(kt_.bits_pushed()));
            }

        private:
            KtCostStream kt_;
        };
        return std::make_unique<S>();
    }
};

inline EstimatorPtr make_identity_estimator() { return std::make_shared<IdentityEstimator>(); }
inline EstimatorPtr make_ceiling_estimator() { return std::make_shared<CeilingEstimator>(); }
inline EstimatorPtr make_compressor_estimator() { return std::make_shared<CompressorEstimator>(); }

inline std::uint64_t staged_K(const BitWord& w, std::uint64_t stage, const Estimator& est) {
    return est.staged_estimate(w, stage);
}

// K-hat(prefix(A, n)) / n as an exact rational.
inline Ratio ratio(const BitSource& a, std::uint64_t n, const Estimator& est) {
    if (n == 0) throw invalid_range_error("ratio: n must be >= 1");
    return Ratio{est.estimate(prefix(a, n)), n};
}

}  // namespace bitdim
