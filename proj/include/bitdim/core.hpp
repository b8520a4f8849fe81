#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bitdim {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_range_error : error {
    using error::error;
};

// SplitMix64 finalizer. Counter-based, so bit lookups are pure functions of
// (seed, index) and safe to share across threads.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// A finite binary string. Bits are stored one per byte, values 0/1.
class BitWord {
public:
    BitWord() = default;
    explicit BitWord(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        for (auto b : bits_)
            if (b > 1) throw error("BitWord: bit value out of range");
    }

    static BitWord from_string(const std::string& s) {
        std::vector<std::uint8_t> v;
        v.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1') throw error("BitWord: expected '0' or '1'");
            v.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return BitWord(std::move(v));
    }

    std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
        return s;
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    int bit(std::size_t i) const { return bits_.at(i); }
    int operator[](std::size_t i) const { return bits_[i]; }
    void push_back(int b) { bits_.push_back(static_cast<std::uint8_t>(b & 1)); }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    BitWord subword(std::size_t from, std::size_t to) const {
        if (from > to || to > bits_.size()) throw invalid_range_error("BitWord::subword");
        return BitWord(std::vector<std::uint8_t>(bits_.begin() + static_cast<std::ptrdiff_t>(from),
                                                 bits_.begin() + static_cast<std::ptrdiff_t>(to)));
    }

    BitWord concat(const BitWord& other) const {
        std::vector<std::uint8_t> v = bits_;
        v.insert(v.end(), other.bits_.begin(), other.bits_.end());
        return BitWord(std::move(v));
    }

    friend bool operator==(const BitWord& a, const BitWord& b) { return a.bits_ == b.bits_; }
    friend bool operator!=(const BitWord& a, const BitWord& b) { return !(a == b); }

private:
    std::vector<std::uint8_t> bits_;
};

// Injective word -> natural map: prepend a 1 and read as a base-2 numeral.
// The empty word maps to 1. Words longer than 63 bits do not fit in 64 bits.
inline std::uint64_t encode_word(const BitWord& w) {
    if (w.size() > 63) throw error("encode_word: word longer than 63 bits");
    std::uint64_t v = 1;
    for (std::size_t i = 0; i < w.size(); ++i) v = (v << 1) | static_cast<std::uint64_t>(w[i]);
    return v;
}

// Inverse of encode_word for codes >= 1.
inline BitWord decode_word(std::uint64_t code) {
    if (code == 0) throw error("decode_word: 0 is not a word code");
    std::vector<std::uint8_t> v;
    while (code > 1) {
        v.push_back(static_cast<std::uint8_t>(code & 1));
        code >>= 1;
    }
    std::reverse(v.begin(), v.end());
    return BitWord(std::move(v));
}

// A total deterministic map from naturals to bits: the working stand-in for
// an element of Cantor space. Copies share the underlying function.
class BitSource {
public:
    BitSource() = default;
    BitSource(std::string spec, std::function<int(std::uint64_t)> fn)
        : spec_(std::move(spec)), fn_(std::make_shared<std::function<int(std::uint64_t)>>(std::move(fn))) {}

    int bit(std::uint64_t n) const { return (*fn_)(n) & 1; }

    // Replayable key=value description, e.g. "kind=pseudorandom seed=7".
    const std::string& spec() const { return spec_; }

    bool valid() const { return static_cast<bool>(fn_); }

private:
    std::string spec_;
    std::shared_ptr<std::function<int(std::uint64_t)>> fn_;
};

inline BitSource constant_source(int value) {
    return BitSource("kind=constant value=" + std::to_string(value & 1),
                     [v = value & 1](std::uint64_t) { return v; });
}

inline BitSource periodic_source(const BitWord& pattern) {
    if (pattern.empty()) throw error("periodic_source: empty pattern");
    return BitSource("kind=periodic pattern=" + pattern.to_string(),
                     [p = pattern](std::uint64_t n) { return p[static_cast<std::size_t>(n % p.size())]; });
}

inline BitSource pseudorandom_source(std::uint64_t seed) {
    return BitSource("kind=pseudorandom seed=" + std::to_string(seed), [seed](std::uint64_t n) {
        std::uint64_t word = splitmix64(seed + (n >> 6) * 0x9e3779b97f4a7c15ull);
        return static_cast<int>((word >> (n & 63)) & 1);
    });
}

// Materialized word, zero-extended past its end.
inline BitSource word_source(BitWord w, std::string spec = "") {
    auto shared = std::make_shared<BitWord>(std::move(w));
    if (spec.empty()) spec = "kind=word length=" + std::to_string(shared->size());
    return BitSource(std::move(spec), [shared](std::uint64_t n) {
        return n < shared->size() ? (*shared)[static_cast<std::size_t>(n)] : 0;
    });
}

inline BitWord prefix(const BitSource& a, std::uint64_t n) {
    std::vector<std::uint8_t> v;
    v.reserve(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(static_cast<std::uint8_t>(a.bit(i)));
    return BitWord(std::move(v));
}

// The string A(m) A(m+1) ... A(n-1).
inline BitWord slice(const BitSource& a, std::uint64_t m, std::uint64_t n) {
    if (m > n) throw invalid_range_error("slice: m > n");
    std::vector<std::uint8_t> v;
    v.reserve(static_cast<std::size_t>(n - m));
    for (std::uint64_t i = m; i < n; ++i) v.push_back(static_cast<std::uint8_t>(a.bit(i)));
    return BitWord(std::move(v));
}

// Interleave: result(2n) = a0(n), result(2n+1) = a1(n).
inline BitSource join2(const BitSource& a0, const BitSource& a1) {
    return BitSource("kind=join2 left{" + a0.spec() + "} right{" + a1.spec() + "}",
                     [a0, a1](std::uint64_t n) { return (n & 1) ? a1.bit(n >> 1) : a0.bit(n >> 1); });
}

inline BitSource even_part(const BitSource& a) {
    return BitSource("kind=even_part of{" + a.spec() + "}", [a](std::uint64_t n) { return a.bit(2 * n); });
}

inline BitSource odd_part(const BitSource& a) {
    return BitSource("kind=odd_part of{" + a.spec() + "}", [a](std::uint64_t n) { return a.bit(2 * n + 1); });
}

// A set of naturals given by its (total) characteristic function.
class GuideSet {
public:
    GuideSet() = default;
    GuideSet(std::string description, std::function<bool(std::uint64_t)> member)
        : description_(std::move(description)),
          member_(std::make_shared<std::function<bool(std::uint64_t)>>(std::move(member))) {}

    bool contains(std::uint64_t n) const { return (*member_)(n); }
    const std::string& description() const { return description_; }
    bool valid() const { return static_cast<bool>(member_); }

private:
    std::string description_;
    std::shared_ptr<std::function<bool(std::uint64_t)>> member_;
};

inline int indicator(const GuideSet& x, std::uint64_t n) { return x.contains(n) ? 1 : 0; }

inline GuideSet empty_guide() {
    return GuideSet("empty", [](std::uint64_t) { return false; });
}

inline GuideSet full_guide() {
    return GuideSet("naturals", [](std::uint64_t) { return true; });
}

inline GuideSet residue_guide(std::uint64_t modulus, std::uint64_t residue) {
    if (modulus == 0) throw error("residue_guide: modulus 0");
    return GuideSet("residue " + std::to_string(residue) + " mod " + std::to_string(modulus),
                    [modulus, residue](std::uint64_t n) { return n % modulus == residue; });
}

inline GuideSet complement_guide(const GuideSet& x) {
    return GuideSet("complement of " + x.description(), [x](std::uint64_t n) { return !x.contains(n); });
}

// X0 (+) X0: n is a member iff floor(n/2) is in X0.
inline GuideSet doubled_guide(const GuideSet& x0) {
    return GuideSet("doubled " + x0.description(), [x0](std::uint64_t n) { return x0.contains(n / 2); });
}

// Triple recursive join: membership(3k + j) = a_j(k).
inline GuideSet join3(const GuideSet& a0, const GuideSet& a1, const GuideSet& a2) {
    return GuideSet("join3 [" + a0.description() + " | " + a1.description() + " | " + a2.description() + "]",
                    [a0, a1, a2](std::uint64_t n) {
                        switch (n % 3) {
                            case 0: return a0.contains(n / 3);
                            case 1: return a1.contains(n / 3);
                            default: return a2.contains(n / 3);
                        }
                    });
}

inline GuideSet tripled_guide(const GuideSet& s0) { return join3(s0, s0, s0); }

}  // namespace bitdim
