#pragma once

#include <bitdim/core.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bitdim {

struct exhausted_error : error {
    using error::error;
};

struct preimage_bound_error : error {
    using error::error;
};

enum class ScanStatus { found, inconclusive, exhausted_at_horizon };

// Strictly increasing set of naturals, given by its next-element generator.
// Generators may be partial past some point; nullopt means the set has no
// further elements the generator can certify.
class IndexSet {
public:
    IndexSet() = default;
    IndexSet(std::string label, std::function<std::optional<std::uint64_t>(std::uint64_t)> next)
        : label_(std::move(label)),
          next_(std::make_shared<std::function<std::optional<std::uint64_t>(std::uint64_t)>>(std::move(next))) {}

    const std::string& label() const { return label_; }

    // least element >= n, if the generator can produce one
    std::optional<std::uint64_t> next_at_or_after(std::uint64_t n) const {
        auto r = (*next_)(n);
        if (r && *r < n) throw error("IndexSet '" + label_ + "': generator went backwards");
        return r;
    }

    bool contains(std::uint64_t n) const {
        auto r = next_at_or_after(n);
        return r && *r == n;
    }

    // all elements in [lo, hi], strictly increasing
    std::vector<std::uint64_t> enumerate(std::uint64_t lo, std::uint64_t hi) const {
        std::vector<std::uint64_t> out;
        std::uint64_t q = lo;
        for (;;) {
            auto r = next_at_or_after(q);
            if (!r || *r > hi) break;
            if (!out.empty() && *r <= out.back()) throw error("IndexSet '" + label_ + "': enumeration not increasing");
            out.push_back(*r);
            if (*r == ~0ull) break;
            q = *r + 1;
        }
        return out;
    }

    // k-th element, 0-based
    std::optional<std::uint64_t> nth(std::uint64_t k) const {
        std::uint64_t q = 0;
        for (std::uint64_t i = 0;; ++i) {
            auto r = next_at_or_after(q);
            if (!r) return std::nullopt;
            if (i == k) return r;
            if (*r == ~0ull) return std::nullopt;
            q = *r + 1;
        }
    }

private:
    std::string label_;
    std::shared_ptr<std::function<std::optional<std::uint64_t>(std::uint64_t)>> next_;
};

inline IndexSet naturals() {
    return IndexSet("naturals", [](std::uint64_t n) { return std::optional<std::uint64_t>(n); });
}

// {a, a+d, a+2d, ...}
inline IndexSet arithmetic_progression(std::uint64_t a, std::uint64_t d) {
    if (d == 0) throw error("arithmetic_progression: zero step");
    return IndexSet("progression a=" + std::to_string(a) + " d=" + std::to_string(d),
                    [a, d](std::uint64_t n) -> std::optional<std::uint64_t> {
                        if (n <= a) return a;
                        std::uint64_t q = (n - a + d - 1) / d;
                        if (q > (~0ull - a) / d) return std::nullopt;
                        return a + q * d;
                    });
}

// {a, a*r, a*r^2, ...} until 64-bit range runs out
inline IndexSet geometric(std::uint64_t a, std::uint64_t r) {
    if (a == 0 || r < 2) throw error("geometric: need a >= 1, r >= 2");
    return IndexSet("geometric a=" + std::to_string(a) + " r=" + std::to_string(r),
                    [a, r](std::uint64_t n) -> std::optional<std::uint64_t> {
                        std::uint64_t v = a;
                        for (;;) {
                            if (v >= n) return v;
                            if (v > ~0ull / r) return std::nullopt;
                            v *= r;
                        }
                    });
}

inline IndexSet from_list(std::vector<std::uint64_t> elems, std::string label = "list") {
    for (std::size_t i = 0; i + 1 < elems.size(); ++i)
        if (elems[i] >= elems[i + 1]) throw error("from_list: not strictly increasing");
    auto shared = std::make_shared<std::vector<std::uint64_t>>(std::move(elems));
    return IndexSet(std::move(label), [shared](std::uint64_t n) -> std::optional<std::uint64_t> {
        auto it = std::lower_bound(shared->begin(), shared->end(), n);
        if (it == shared->end()) return std::nullopt;
        return *it;
    });
}

// {encode_word(prefix(A, n)) : n >= 0}, the set of codes of a source's
// prefixes. Codes of successive prefixes are strictly increasing. 64-bit
// codes run out at n = 62.
inline IndexSet prefix_code_set(const BitSource& a) {
    return IndexSet("prefix-codes of " + a.spec(), [a](std::uint64_t n) -> std::optional<std::uint64_t> {
        for (std::uint64_t len = 0; len <= 62; ++len) {
            std::uint64_t code = encode_word(prefix(a, len));
            if (code >= n) return code;
        }
        return std::nullopt;
    });
}

// Membership form of the same set: n is a member iff decoding n yields a
// prefix of A.
inline GuideSet prefix_code_guide(const BitSource& a) {
    return GuideSet("prefix-codes of " + a.spec(), [a](std::uint64_t n) {
        if (n == 0) return false;
        auto w = decode_word(n);
        return w == prefix(a, w.size());
    });
}

// drops the first m elements
inline IndexSet tail(const IndexSet& n, std::uint64_t m) {
    auto start = n.nth(m);
    if (!start) throw exhausted_error("tail: set has fewer than " + std::to_string(m + 1) + " elements");
    std::uint64_t s = *start;
    return IndexSet("tail " + std::to_string(m) + " of " + n.label(),
                    [n, s](std::uint64_t q) { return n.next_at_or_after(std::max(q, s)); });
}

// Total map with finite preimages, used to transport index sets.
struct FiniteToOneMap {
    std::string label;
    std::function<std::uint64_t(std::uint64_t)> apply;
};

inline FiniteToOneMap identity_map() {
    return {"identity", [](std::uint64_t n) { return n; }};
}

inline FiniteToOneMap halving_map() {
    return {"halving", [](std::uint64_t n) { return n / 2; }};
}

// {n : f(n) in N}. The generator scans forward up to search_cap steps per
// query; per-value preimage counting happens in preimage_enumerate.
inline IndexSet finite_to_one_preimage(const FiniteToOneMap& f, const IndexSet& n,
                                       std::uint64_t search_cap = (1ull << 22)) {
    return IndexSet("preimage " + f.label + " of " + n.label(),
                    [f, n, search_cap](std::uint64_t q) -> std::optional<std::uint64_t> {
                        for (std::uint64_t i = 0; i <= search_cap; ++i) {
                            std::uint64_t cand = q + i;
                            if (n.contains(f.apply(cand))) return cand;
                            if (cand == ~0ull) break;
                        }
                        return std::nullopt;
                    });
}

// Enumerates the preimage over [lo, hi] while enforcing the finite-to-one
// bound: more than per_value_bound hits on one value is a contract breach.
inline std::vector<std::uint64_t> preimage_enumerate(const FiniteToOneMap& f, const IndexSet& n, std::uint64_t lo,
                                                     std::uint64_t hi, std::uint64_t per_value_bound = 64) {
    std::vector<std::uint64_t> out;
    std::map<std::uint64_t, std::uint64_t> hits;
    for (std::uint64_t cand = lo; cand <= hi; ++cand) {
        std::uint64_t v = f.apply(cand);
        if (n.contains(v)) {
            if (++hits[v] > per_value_bound)
                throw preimage_bound_error("preimage bound exceeded at value " + std::to_string(v));
            out.push_back(cand);
        }
        if (cand == ~0ull) break;
    }
    return out;
}

// Greedy strictly increasing subsequence of an arrival-ordered stream.
inline IndexSet thin_enumeration(const std::vector<std::uint64_t>& stream, std::string label = "thinned") {
    std::vector<std::uint64_t> kept;
    for (auto v : stream)
        if (kept.empty() || v > kept.back()) kept.push_back(v);
    return from_list(std::move(kept), std::move(label));
}

struct IndexFamily {
    std::string label;
    std::vector<IndexSet> members;

    IndexFamily(std::string l, std::vector<IndexSet> m) : label(std::move(l)), members(std::move(m)) {
        if (members.empty()) throw error("IndexFamily: empty member list");
    }
};

// cofinite tails {[m, inf) : m in starts}
inline IndexFamily cofinite_tails(const std::vector<std::uint64_t>& starts, std::string label = "cofinite-tails") {
    std::vector<IndexSet> members;
    for (auto m : starts)
        members.push_back(IndexSet("tail-from-" + std::to_string(m), [m](std::uint64_t n) {
            return std::optional<std::uint64_t>(std::max(n, m));
        }));
    return IndexFamily(std::move(label), std::move(members));
}

// Tails of one set that still meet [lo, hi]. Tail m+1 misses the window as
// soon as tail m does, so the scan stops at the first miss.
inline IndexFamily intersecting_tails(const IndexSet& n, std::uint64_t lo, std::uint64_t hi,
                                      std::string label = "") {
    std::vector<IndexSet> members;
    for (std::uint64_t m = 0;; ++m) {
        try {
            IndexSet t = tail(n, m);
            auto first = t.next_at_or_after(lo);
            if (!first || *first > hi) break;
            members.push_back(std::move(t));
        } catch (const exhausted_error&) {
            break;
        }
    }
    if (members.empty())
        throw exhausted_error("intersecting_tails: no tail of '" + n.label() + "' meets the window");
    if (label.empty()) label = "tails of " + n.label();
    return IndexFamily(std::move(label), std::move(members));
}

struct ImmunityMemberReport {
    std::string member_label;
    ScanStatus status = ScanStatus::inconclusive;
    std::uint64_t witness = 0;        // least element outside S, when found
    std::uint64_t elements_checked = 0;
};

// Finite necessary-condition scan against "some member is contained in S":
// a witness is an element of the member outside S.
inline std::vector<ImmunityMemberReport> immunity_scan(const GuideSet& s, const IndexFamily& fam,
                                                       std::uint64_t depth) {
    if (depth < 1) throw invalid_range_error("immunity_scan: depth must be >= 1");
    std::vector<ImmunityMemberReport> out;
    for (const auto& member : fam.members) {
        ImmunityMemberReport rep;
        rep.member_label = member.label();
        std::uint64_t q = 0;
        for (std::uint64_t i = 0; i < depth; ++i) {
            auto e = member.next_at_or_after(q);
            if (!e) {
                rep.status = ScanStatus::exhausted_at_horizon;
                break;
            }
            ++rep.elements_checked;
            if (!s.contains(*e)) {
                rep.status = ScanStatus::found;
                rep.witness = *e;
                break;
            }
            if (*e == ~0ull) {
                rep.status = ScanStatus::exhausted_at_horizon;
                break;
            }
            q = *e + 1;
        }
        out.push_back(std::move(rep));
    }
    return out;
}

}  // namespace bitdim
