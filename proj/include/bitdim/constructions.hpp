#pragma once

#include <bitdim/core.hpp>
#include <bitdim/families.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bitdim {

using BigInt = boost::multiprecision::cpp_int;

struct below_first_boundary_error : error {
    using error::error;
};

struct horizon_too_deep_error : error {
    using error::error;
};

struct unsatisfiable_bank_error : error {
    using error::error;
};

// Segment boundary sequence. Values are exact big integers; 64-bit views are
// provided for indexing real positions.
class SegmentSchedule {
public:
    SegmentSchedule() = default;
    SegmentSchedule(std::string spec, std::function<BigInt(std::uint64_t)> boundary)
        : spec_(std::move(spec)),
          boundary_(std::make_shared<std::function<BigInt(std::uint64_t)>>(std::move(boundary))) {}

    const std::string& spec() const { return spec_; }
    BigInt boundary(std::uint64_t k) const { return (*boundary_)(k); }

    std::optional<std::uint64_t> boundary_u64(std::uint64_t k) const {
        BigInt b = boundary(k);
        if (b > BigInt(~0ull)) return std::nullopt;
        return static_cast<std::uint64_t>(b);
    }

    // strictly increasing everywhere; more than triples from k = 1 on.
    // Schedules backed by finite tables validate as far as they reach.
    void validate(std::uint64_t k_max) const {
        BigInt prev = boundary(0);
        if (prev < 1) throw error("schedule: boundaries must be positive");
        for (std::uint64_t k = 1; k <= k_max; ++k) {
            BigInt cur;
            try {
                cur = boundary(k);
            } catch (const horizon_too_deep_error&) {
                return;
            }
            if (cur <= prev) throw error("schedule: boundaries not strictly increasing at k=" + std::to_string(k));
            if (k >= 2 && cur <= 3 * prev)
                throw error("schedule: growth factor at k=" + std::to_string(k) + " is not above 3");
            prev = cur;
        }
    }

private:
    std::string spec_;
    std::shared_ptr<std::function<BigInt(std::uint64_t)>> boundary_;
};

// s_k = 2^(c*k^2)
inline SegmentSchedule squares_schedule(std::uint64_t c = 1) {
    if (c == 0) throw error("squares_schedule: c must be >= 1");
    return SegmentSchedule("kind=squares c=" + std::to_string(c),
                           [c](std::uint64_t k) { return BigInt(1) << (c * k * k); });
}

// s_0 = 1, s_k = 2^(k^2 - k + 2): same flavor, denser at small k
inline SegmentSchedule compressed_schedule() {
    return SegmentSchedule("kind=compressed", [](std::uint64_t k) {
        if (k == 0) return BigInt(1);
        return BigInt(1) << (k * k - k + 2);
    });
}

inline SegmentSchedule explicit_schedule(std::vector<std::uint64_t> boundaries) {
    std::string spec = "kind=explicit boundaries=";
    for (std::size_t i = 0; i < boundaries.size(); ++i) spec += (i ? "," : "") + std::to_string(boundaries[i]);
    auto shared = std::make_shared<std::vector<std::uint64_t>>(std::move(boundaries));
    return SegmentSchedule(std::move(spec), [shared](std::uint64_t k) {
        if (k >= shared->size()) throw horizon_too_deep_error("explicit schedule: boundary index beyond table");
        return BigInt((*shared)[static_cast<std::size_t>(k)]);
    });
}

enum class SegmentFilter { all, odd, mod3eq2 };

inline bool filter_admits(SegmentFilter f, std::uint64_t k) {
    switch (f) {
        case SegmentFilter::all: return true;
        case SegmentFilter::odd: return k % 2 == 1;
        default: return k % 3 == 2;
    }
}

// Admissible boundaries that fit in 64 bits, in increasing k order. Any
// position queryable as uint64 lies below the first omitted boundary.
struct SegmentIndex {
    std::vector<std::uint64_t> ks;
    std::vector<std::uint64_t> boundaries;

    SegmentIndex(const SegmentSchedule& sched, SegmentFilter filter) {
        for (std::uint64_t k = 0;; ++k) {
            std::optional<std::uint64_t> b;
            try {
                b = sched.boundary_u64(k);
            } catch (const horizon_too_deep_error&) {
                break;
            }
            if (!b) break;
            if (filter_admits(filter, k)) {
                ks.push_back(k);
                boundaries.push_back(*b);
            }
            if (k > 4096) throw error("SegmentIndex: schedule grows too slowly");
        }
        if (boundaries.empty()) throw below_first_boundary_error("SegmentIndex: no admissible boundary fits");
    }

    // max admissible k with s_k <= n
    std::optional<std::size_t> slot_of(std::uint64_t n) const {
        auto it = std::upper_bound(boundaries.begin(), boundaries.end(), n);
        if (it == boundaries.begin()) return std::nullopt;
        return static_cast<std::size_t>(it - boundaries.begin()) - 1;
    }
};

// max{admissible k : s_k <= n}
inline std::uint64_t k_of_n(const SegmentSchedule& sched, std::uint64_t n, SegmentFilter filter = SegmentFilter::all) {
    SegmentIndex idx(sched, filter);
    auto slot = idx.slot_of(n);
    if (!slot) throw below_first_boundary_error("k_of_n: n is below the first admissible boundary");
    return idx.ks[*slot];
}

// Alternating segment source: even-k segments copy R shifted to the segment
// start, odd-k segments are zero. Positions below the first boundary are 0.
inline BitSource build_alternating(const BitSource& r, const SegmentSchedule& sched) {
    sched.validate(8);
    auto idx = std::make_shared<SegmentIndex>(sched, SegmentFilter::all);
    return BitSource("kind=alternating sched{" + sched.spec() + "} r{" + r.spec() + "}",
                     [r, idx](std::uint64_t n) {
                         auto slot = idx->slot_of(n);
                         if (!slot) return 0;
                         if (idx->ks[*slot] % 2 != 0) return 0;
                         return r.bit(n - idx->boundaries[*slot]);
                     });
}

enum class DoubleSegmentMode { si_zero, is_random };

// Segments are tracked over odd k only. The doubled guide X0 (+) X0 decides
// which segments carry source bits; is_random uses its complement.
inline BitSource build_double_segment(const BitSource& source, const GuideSet& x0, const SegmentSchedule& sched,
                                      DoubleSegmentMode mode) {
    sched.validate(8);
    auto idx = std::make_shared<SegmentIndex>(sched, SegmentFilter::odd);
    GuideSet x = doubled_guide(x0);
    bool invert = mode == DoubleSegmentMode::is_random;
    std::string mname = invert ? "is-random" : "si-zero";
    return BitSource("kind=double-segment mode=" + mname + " sched{" + sched.spec() + "} x0{" + x0.description() +
                         "} src{" + source.spec() + "}",
                     [source, x, idx, invert](std::uint64_t n) {
                         auto slot = idx->slot_of(n);
                         if (!slot) return 0;
                         bool carries = x.contains(idx->ks[*slot]);
                         if (invert) carries = !carries;
                         if (!carries) return 0;
                         return source.bit(n - idx->boundaries[*slot]);
                     });
}

// Growth-rate input for the boundary recurrence. g(n) = max over i <= n of
// f(i) is evaluated exhaustively for small arguments; beyond the exhaustive
// cap the map must be declared monotone so g(n) = f(n).
struct RateFunction {
    std::string label;
    std::function<BigInt(const BigInt&)> apply;
    bool declared_monotone = false;
};

inline RateFunction identity_rate() {
    return {"identity", [](const BigInt& n) { return n; }, true};
}

inline RateFunction square_rate() {
    return {"square", [](const BigInt& n) { return n * n; }, true};
}

inline constexpr std::uint64_t kExhaustiveRateCap = 1ull << 20;

struct EllLambda {
    std::vector<BigInt> ell;
    std::vector<BigInt> lambda;
};

// ell_0 = lambda_0 = 1; lambda_k = lambda_{k-1} + ell_{k-1};
// ell_k = least 2^(n^2) exceeding g(lambda_k). The use map is padded below by
// the identity so the recurrence's ordering facts hold for every input.
inline EllLambda ell_lambda(const RateFunction& f, std::uint64_t k_steps) {
    EllLambda out;
    out.ell.push_back(1);
    out.lambda.push_back(1);
    auto g = [&](const BigInt& n) {
        BigInt best = n;
        if (f.declared_monotone) {
            BigInt v = f.apply(n);
            if (v > best) best = v;
            return best;
        }
        if (n > BigInt(kExhaustiveRateCap))
            throw horizon_too_deep_error("ell_lambda: non-monotone rate beyond exhaustive cap");
        for (BigInt i = 0; i <= n; ++i) {
            BigInt v = f.apply(i);
            if (v > best) best = v;
        }
        return best;
    };
    for (std::uint64_t k = 1; k <= k_steps; ++k) {
        BigInt lam = out.lambda.back() + out.ell.back();
        BigInt gv = g(lam);
        std::uint64_t n = 0;
        while ((BigInt(1) << (n * n)) <= gv) ++n;
        out.lambda.push_back(lam);
        out.ell.push_back(BigInt(1) << (n * n));
    }
    return out;
}

// Schedule view of a computed ell sequence.
inline SegmentSchedule ell_schedule(const EllLambda& el, std::string rate_label) {
    auto shared = std::make_shared<std::vector<BigInt>>(el.ell);
    return SegmentSchedule("kind=ell rate=" + std::move(rate_label), [shared](std::uint64_t k) {
        if (k >= shared->size()) throw horizon_too_deep_error("ell schedule: recurrence not computed that deep");
        return (*shared)[static_cast<std::size_t>(k)];
    });
}

// X(n) = R(n - ell_{k_n}) * 1_S(k_n) over k = 2 mod 3 boundaries, with S the
// tripled guide of S0.
inline BitSource build_triple_guided(const BitSource& r, const GuideSet& s0, const EllLambda& el,
                                     std::string rate_label = "identity") {
    auto sched = ell_schedule(el, std::move(rate_label));
    std::vector<std::uint64_t> ks, bounds;
    for (std::uint64_t k = 0; k < el.ell.size(); ++k) {
        if (!filter_admits(SegmentFilter::mod3eq2, k)) continue;
        if (el.ell[static_cast<std::size_t>(k)] > BigInt(~0ull)) break;
        ks.push_back(k);
        bounds.push_back(static_cast<std::uint64_t>(el.ell[static_cast<std::size_t>(k)]));
    }
    if (ks.empty()) throw horizon_too_deep_error("build_triple_guided: no admissible boundary computed");
    GuideSet s = tripled_guide(s0);
    auto shared_ks = std::make_shared<std::vector<std::uint64_t>>(std::move(ks));
    auto shared_bounds = std::make_shared<std::vector<std::uint64_t>>(std::move(bounds));
    return BitSource("kind=triple-guided sched{" + sched.spec() + "} s0{" + s0.description() + "} r{" + r.spec() + "}",
                     [r, s, shared_ks, shared_bounds](std::uint64_t n) {
                         auto it = std::upper_bound(shared_bounds->begin(), shared_bounds->end(), n);
                         if (it == shared_bounds->begin()) return 0;
                         std::size_t slot = static_cast<std::size_t>(it - shared_bounds->begin()) - 1;
                         std::uint64_t k = (*shared_ks)[slot];
                         if (!s.contains(k)) return 0;
                         return r.bit(n - (*shared_bounds)[slot]);
                     });
}

enum class Polarity { compressible, incompressible };

struct Requirement {
    std::string label;
    IndexSet lengths;
    Polarity polarity = Polarity::compressible;
};

struct MeetingLogEntry {
    std::string requirement;
    std::uint64_t met_at_length = 0;
    Polarity polarity = Polarity::compressible;
};

struct GenericBuild {
    BitSource source;
    std::vector<MeetingLogEntry> log;
};

// Finite-extension construction: cycle through the bank, each turn extending
// to the requirement's next admissible length with an all-zero block or a
// block copied from the high source at absolute positions. A requirement
// whose next length overshoots the horizon is skipped; the build stops once
// a full cycle of skips occurs.
inline GenericBuild build_generic_like(const std::vector<Requirement>& bank, std::uint64_t horizon,
                                       const BitSource& high, std::string label = "generic") {
    if (bank.empty()) throw error("build_generic_like: empty bank");
    for (std::size_t i = 0; i < bank.size(); ++i)
        for (std::size_t j = i + 1; j < bank.size(); ++j) {
            if (bank[i].polarity == bank[j].polarity) continue;
            if (bank[i].lengths.enumerate(1, horizon) == bank[j].lengths.enumerate(1, horizon))
                throw unsatisfiable_bank_error("requirements '" + bank[i].label + "' and '" + bank[j].label +
                                               "' demand opposite blocks at identical lengths");
        }
    BitWord bits;
    std::vector<MeetingLogEntry> log;
    std::vector<std::uint64_t> meets(bank.size(), 0);
    std::size_t turn = 0, skips = 0;
    while (bits.size() < horizon && skips < bank.size()) {
        std::size_t who = turn % bank.size();
        const auto& req = bank[who];
        ++turn;
        auto target = req.lengths.next_at_or_after(bits.size() + 1);
        if (!target || *target > horizon) {
            ++skips;
            continue;
        }
        skips = 0;
        // serving this length must not burn an opposite requirement's last slot
        for (const auto& other : bank) {
            if (other.polarity == req.polarity || !other.lengths.contains(*target)) continue;
            auto nxt = other.lengths.next_at_or_after(*target + 1);
            if (!nxt || *nxt > horizon)
                throw unsatisfiable_bank_error("serving '" + req.label + "' at length " + std::to_string(*target) +
                                               " conflicts with the last slot of '" + other.label + "'");
        }
        while (bits.size() < *target)
            bits.push_back(req.polarity == Polarity::incompressible ? high.bit(bits.size()) : 0);
        log.push_back({req.label, *target, req.polarity});
        ++meets[who];
    }
    for (std::size_t i = 0; i < bank.size(); ++i)
        if (meets[i] == 0)
            throw unsatisfiable_bank_error("requirement '" + bank[i].label + "' was never met below the horizon");
    while (bits.size() < horizon) bits.push_back(0);
    return GenericBuild{word_source(std::move(bits), "kind=" + label + " horizon=" + std::to_string(horizon) +
                                                         " high{" + high.spec() + "}"),
                        std::move(log)};
}

// One family member's result from the adjacent zero-segment scan.
struct SegmentPairReport {
    std::string member_label;
    ScanStatus status = ScanStatus::exhausted_at_horizon;
    std::uint64_t witness = 0;  // least n whose slot and the previous odd slot both skip the guide
    std::uint64_t elements_checked = 0;
};

// For each member N: least n <= horizon lying in a non-carrying odd segment
// whose preceding odd segment also does not carry, under the doubled guide.
// No such n below the horizon is an exhausted report, not a failure.
inline std::vector<SegmentPairReport> adjacent_zero_scan(const GuideSet& x0, const SegmentSchedule& sched,
                                                         const IndexFamily& fam, std::uint64_t horizon) {
    SegmentIndex idx(sched, SegmentFilter::odd);
    GuideSet x = doubled_guide(x0);
    std::vector<SegmentPairReport> out;
    out.reserve(fam.members.size());
    for (const auto& member : fam.members) {
        SegmentPairReport rep;
        rep.member_label = member.label();
        if (idx.boundaries.size() >= 2) {
            for (auto n : member.enumerate(idx.boundaries[1], horizon)) {
                ++rep.elements_checked;
                auto slot = idx.slot_of(n);
                if (!slot || *slot < 1) continue;
                if (!x.contains(idx.ks[*slot]) && !x.contains(idx.ks[*slot - 1])) {
                    rep.status = ScanStatus::found;
                    rep.witness = n;
                    break;
                }
            }
        }
        out.push_back(std::move(rep));
    }
    return out;
}

// Boundary index sets: {s_k : k = residue (mod modulus)}, first `drop`
// elements removed. Only boundaries that fit in 64 bits are enumerable.
inline IndexSet endpoint_set(const SegmentSchedule& sched, std::uint64_t modulus, std::uint64_t residue,
                             std::uint64_t drop, std::string label = "") {
    if (modulus == 0) throw error("endpoint_set: modulus 0");
    std::vector<std::uint64_t> elems;
    for (std::uint64_t k = residue;; k += modulus) {
        std::optional<std::uint64_t> b;
        try {
            b = sched.boundary_u64(k);
        } catch (const horizon_too_deep_error&) {
            break;
        }
        if (!b) break;
        elems.push_back(*b);
        if (k > 4096) throw error("endpoint_set: schedule grows too slowly");
    }
    if (drop >= elems.size())
        throw exhausted_error("endpoint_set: drop exceeds enumerable boundary count");
    elems.erase(elems.begin(), elems.begin() + static_cast<std::ptrdiff_t>(drop));
    if (label.empty())
        label = "boundaries k=" + std::to_string(residue) + " mod " + std::to_string(modulus) + " drop " +
                std::to_string(drop) + " of " + sched.spec();
    return from_list(std::move(elems), std::move(label));
}

// {ell_k : k in S}, S the tripled guide of S0, first `drop` removed: the
// boundary set a triple-guided build makes computable from its guide.
inline IndexSet ell_endpoint_set(const EllLambda& el, const GuideSet& s0, std::uint64_t drop,
                                 std::string label = "") {
    GuideSet s = tripled_guide(s0);
    std::vector<std::uint64_t> elems;
    for (std::uint64_t k = 0; k < el.ell.size(); ++k) {
        if (el.ell[static_cast<std::size_t>(k)] > BigInt(~0ull)) break;
        std::uint64_t v = static_cast<std::uint64_t>(el.ell[static_cast<std::size_t>(k)]);
        if (s.contains(k) && (elems.empty() || v > elems.back())) elems.push_back(v);
    }
    if (drop >= elems.size()) throw exhausted_error("ell_endpoint_set: drop exceeds enumerable boundary count");
    elems.erase(elems.begin(), elems.begin() + static_cast<std::ptrdiff_t>(drop));
    if (label.empty()) label = "ell boundaries in " + s0.description() + " drop " + std::to_string(drop);
    return from_list(std::move(elems), std::move(label));
}

// {ell_{k+3} : k = 2 mod 3, k in S}: right endpoints of the carrier
// segments, where a guided build has accumulated a full source block.
inline IndexSet carrier_right_endpoint_set(const EllLambda& el, const GuideSet& s0, std::uint64_t drop,
                                           std::string label = "") {
    GuideSet s = tripled_guide(s0);
    std::vector<std::uint64_t> elems;
    for (std::uint64_t k = 2; k + 3 < el.ell.size(); k += 3) {
        if (el.ell[static_cast<std::size_t>(k + 3)] > BigInt(~0ull)) break;
        if (s.contains(k)) elems.push_back(static_cast<std::uint64_t>(el.ell[static_cast<std::size_t>(k + 3)]));
    }
    if (drop >= elems.size())
        throw exhausted_error("carrier_right_endpoint_set: drop exceeds enumerable carrier count");
    elems.erase(elems.begin(), elems.begin() + static_cast<std::ptrdiff_t>(drop));
    if (label.empty()) label = "carrier right ends of " + s0.description() + " drop " + std::to_string(drop);
    return from_list(std::move(elems), std::move(label));
}

}  // namespace bitdim
