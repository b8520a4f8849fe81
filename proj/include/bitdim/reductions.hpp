#pragma once

#include <bitdim/complexity.hpp>
#include <bitdim/constructions.hpp>
#include <bitdim/dimensions.hpp>
#include <bitdim/families.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bitdim {

struct use_violation_error : error {
    using error::error;
};

// One track change: the stage that consumed it, the track being left, the
// least prefix length that violated the deficiency, and the raised value.
struct SwitchLogEntry {
    std::uint64_t stage = 0;
    int from_track = 0;
    std::uint64_t trigger_n = 0;
    std::uint64_t deficiency = 0;
};

// Oracle accounting over the joined index space 2m+i. bound_respected is
// checked per query against the bits emitted at that moment, so a violation
// anywhere in the run is visible at the end.
struct QueryStats {
    std::uint64_t queries = 0;
    std::uint64_t high_water = 0;
    bool bound_respected = true;
};

struct TransducerState {
    BitWord output;
    std::vector<SwitchLogEntry> switches;
    int track = 0;
    std::array<std::uint64_t, 2> deficiency{0, 0};
    std::uint64_t stage = 0;
    QueryStats stats;
};

// Per stage s = 1..stages: scan prefix lengths n of the current track; if the
// staged estimate at stage s drops below n minus the track's deficiency,
// raise the deficiency to that gap and switch tracks (consuming the stage),
// otherwise emit the track's next bit. Deficiencies never decrease. The scan
// stops at one past the emitted length, not at s, so the joined query index
// stays below 2*(bits emitted) + 2 throughout.
inline TransducerState transduce(const BitSource& a0, const BitSource& a1, std::uint64_t stages,
                                 const Estimator& est) {
    if (stages == 0) throw invalid_range_error("transduce: stages must be >= 1");

    TransducerState st;
    const BitSource* tracks[2] = {&a0, &a1};
    auto query = [&](int i, std::uint64_t m) {
        std::uint64_t joined = 2 * m + static_cast<std::uint64_t>(i);
        ++st.stats.queries;
        if (joined > st.stats.high_water) st.stats.high_water = joined;
        if (joined >= 2 * st.output.size() + 2) st.stats.bound_respected = false;
        return tracks[i]->bit(m);
    };

    // Per-track incremental view: staged[n-1] is the stage-unlocked estimate
    // of the length-n prefix (identical to staged_estimate once the stage
    // reaches n, which the scan bound guarantees). max_gap tracks the largest
    // n - staged[n-1] seen so far.
    struct TrackView {
        std::unique_ptr<Estimator::PrefixStream> stream;
        std::vector<std::uint64_t> staged;
        std::uint64_t max_gap = 0;
    };
    TrackView views[2];
    views[0].stream = est.stream();
    views[1].stream = est.stream();

    for (st.stage = 1; st.stage <= stages; ++st.stage) {
        int i = st.track;
        TrackView& v = views[i];
        std::uint64_t bound = std::min(st.stage, st.output.size() + 1);
        while (v.staged.size() < bound) {
            v.stream->push(query(i, v.staged.size()));
            std::uint64_t n = v.stream->length();
            std::uint64_t val = std::min(v.stream->estimate(), length_ceiling(n));
            v.staged.push_back(val);
            if (n > val && n - val > v.max_gap) v.max_gap = n - val;
        }
        if (v.max_gap > st.deficiency[static_cast<std::size_t>(i)]) {
            std::uint64_t c = st.deficiency[static_cast<std::size_t>(i)];
            for (std::uint64_t n = 1; n <= bound; ++n) {
                std::uint64_t val = v.staged[static_cast<std::size_t>(n - 1)];
                if (val + c < n) {
                    st.deficiency[static_cast<std::size_t>(i)] = n - val;
                    st.switches.push_back({st.stage, i, n, n - val});
                    break;
                }
            }
            st.track = 1 - i;
            continue;
        }
        st.output.push_back(query(i, st.output.size()));
    }
    st.stage = stages;
    return st;
}

inline constexpr std::uint64_t kDefaultWttStepBudget = 1ull << 12;

// Oracle machine with a declared use bound: computing output bit n may only
// read oracle indices below use_bound(n). The evaluator sees the oracle
// through a query callback so the bound is enforced, not assumed. Each output
// bit costs one step plus one per query, against step_budget.
struct WttMachine {
    std::string label;
    std::function<std::uint64_t(std::uint64_t)> use_bound;
    std::function<int(const std::function<int(std::uint64_t)>&, std::uint64_t)> eval;
    std::uint64_t step_budget = kDefaultWttStepBudget;
};

// Output bits plus a totality verdict. On exhaustion, bits holds everything
// computed before stalled_at.
struct WttOutcome {
    BitWord bits;
    bool total = true;
    std::uint64_t stalled_at = 0;
};

inline WttOutcome apply_wtt(const WttMachine& m, const BitSource& x, std::uint64_t n_bits) {
    struct BudgetExhausted {};
    WttOutcome out;
    for (std::uint64_t n = 0; n < n_bits; ++n) {
        std::uint64_t steps = 1;
        if (steps > m.step_budget) {
            out.total = false;
            out.stalled_at = n;
            return out;
        }
        auto query = [&](std::uint64_t q) -> int {
            if (q >= m.use_bound(n))
                throw use_violation_error(m.label + ": bit " + std::to_string(n) + " queried index " +
                                          std::to_string(q) + ", bound " + std::to_string(m.use_bound(n)));
            if (++steps > m.step_budget) throw BudgetExhausted{};
            return x.bit(q);
        };
        try {
            out.bits.push_back(m.eval(query, n) & 1);
        } catch (const BudgetExhausted&) {
            out.total = false;
            out.stalled_at = n;
            return out;
        }
    }
    return out;
}

inline std::uint64_t floor_sqrt(std::uint64_t m) {
    if (m == 0) return 0;
    std::uint64_t x = m;
    std::uint64_t y = (x >> 1) + (x & 1);  // ceil(x/2), safe at the top of the range
    while (y < x) {
        x = y;
        y = (x + m / x) / 2;
    }
    return x;
}

inline WttMachine identity_machine() {
    return {"identity", [](std::uint64_t n) { return n + 1; },
            [](const std::function<int(std::uint64_t)>& q, std::uint64_t n) { return q(n); },
            kDefaultWttStepBudget};
}

// Output bit m copies oracle bit floor(sqrt(m)): oracle bit j fills the block
// [j^2, (j+1)^2), so n oracle bits fix n^2 output bits and the use bound is
// floor(sqrt(m)) + 1.
inline WttMachine bit_repeat_machine() {
    return {"bit-repeat", [](std::uint64_t m) { return floor_sqrt(m) + 1; },
            [](const std::function<int(std::uint64_t)>& q, std::uint64_t m) { return q(floor_sqrt(m)); },
            kDefaultWttStepBudget};
}

// Output bit n samples the oracle just below index n^2; bit 0 is constant
// because a use bound of 0 permits no queries at all.
inline WttMachine square_sampler_machine() {
    auto sq = [](std::uint64_t n) { return n < (1ull << 32) ? n * n : ~0ull; };
    return {"square-sampler", sq,
            [sq](const std::function<int(std::uint64_t)>& q, std::uint64_t n) {
                return n == 0 ? 0 : q(sq(n) - 1);
            },
            kDefaultWttStepBudget};
}

// Guided stream, its boundary-tail family, and the machine image's profile
// against an adversary family, all at one horizon. image is absent when the
// machine stalls; the outcome says where.
struct TransferReport {
    DimensionProfile source;
    std::optional<DimensionProfile> image;
    WttOutcome outcome;
};

inline TransferReport si_transfer_experiment(const BitSource& r, const GuideSet& s0, const RateFunction& rate,
                                             const WttMachine& m, const IndexFamily& adversary,
                                             const Estimator& est, std::uint64_t horizon,
                                             std::uint64_t n_min = 64) {
    EllLambda el;
    bool deep_enough = false;
    for (std::uint64_t k = 2; k <= 64; ++k) {
        el = ell_lambda(rate, k);
        if (el.ell.back() > BigInt(horizon)) {
            deep_enough = true;
            break;
        }
    }
    if (!deep_enough) throw horizon_too_deep_error("si_transfer_experiment: boundary recurrence stalled below horizon");

    BitSource x = build_triple_guided(r, s0, el, rate.label);
    Window w = default_window(horizon, n_min);

    // Boundary tails guided by s0; an empty guide leaves no endpoints, so the
    // family degenerates to tails of every boundary.
    IndexFamily fam_a = [&] {
        try {
            return intersecting_tails(ell_endpoint_set(el, s0, 0), w.n_min, w.n_max);
        } catch (const exhausted_error&) {
            return intersecting_tails(ell_endpoint_set(el, full_guide(), 0), w.n_min, w.n_max, "tails of ell boundaries");
        }
    }();

    TransferReport rep;
    rep.source = profile(x, est, fam_a, w);
    rep.outcome = apply_wtt(m, x, horizon);
    if (rep.outcome.total) {
        BitSource image = word_source(rep.outcome.bits, "kind=wtt-image machine=" + m.label + " oracle{" + x.spec() + "}");
        rep.image = profile(image, est, adversary, w);
    }
    return rep;
}

}  // namespace bitdim
