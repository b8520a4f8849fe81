#pragma once

#include <bitdim/complexity.hpp>
#include <bitdim/core.hpp>
#include <bitdim/families.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace bitdim {

// Evaluation window for the finite dimension functionals. m_grid lists the
// tail starts the sup/inf alternation ranges over.
struct Window {
    std::uint64_t n_min = 64;
    std::uint64_t n_max = 0;
    std::vector<std::uint64_t> m_grid;

    void validate() const {
        if (n_min < 1 || n_min >= n_max) throw error("Window: need 1 <= n_min < n_max");
        if (m_grid.empty()) throw error("Window: empty m_grid");
        for (auto m : m_grid)
            if (m >= n_max) throw error("Window: m_grid entry " + std::to_string(m) + " not below the horizon");
    }
};

// Powers of two up to n_max / 4.
inline Window default_window(std::uint64_t n_max, std::uint64_t n_min = 64) {
    Window w;
    w.n_min = n_min;
    w.n_max = n_max;
    for (std::uint64_t m = 1; m <= n_max / 4; m *= 2) w.m_grid.push_back(m);
    w.validate();
    return w;
}

// Prefix estimates for one (source, estimator) pair over a window, indexed by
// prefix length. Built once, shared by all functionals of a profile.
struct RatioTable {
    Window window;
    std::string source_spec;
    std::string estimator_name;
    std::vector<std::uint64_t> estimates;  // estimates[n] = K-hat(prefix(a, n))

    RatioTable(const BitSource& a, const Estimator& est, const Window& w)
        : window(w), source_spec(a.spec()), estimator_name(est.name()) {
        w.validate();
        estimates = est.prefix_estimates(a, w.n_max);
    }

    Ratio at(std::uint64_t n) const {
        if (n < 1 || n > window.n_max) throw invalid_range_error("RatioTable::at");
        return Ratio{estimates[static_cast<std::size_t>(n)], n};
    }
};

// Witness for the grid functionals: the grid start that decided the outer
// extremum and the prefix length that decided the inner one.
struct GridWitness {
    std::uint64_t m = 0;
    std::uint64_t n = 0;
};

// max over m in m_grid of min over n in [max(m, n_min), n_max]
inline Ratio dim_H_hat(const RatioTable& t, GridWitness* wit = nullptr) {
    bool have = false;
    Ratio best;
    GridWitness bw;
    for (auto m : t.window.m_grid) {
        std::uint64_t lo = std::max(m, t.window.n_min);
        Ratio inner = t.at(lo);
        std::uint64_t arg = lo;
        for (std::uint64_t n = lo + 1; n <= t.window.n_max; ++n) {
            Ratio r = t.at(n);
            if (r < inner) {
                inner = r;
                arg = n;
            }
        }
        if (!have || inner > best) {
            have = true;
            best = inner;
            bw = {m, arg};
        }
    }
    if (wit) *wit = bw;
    return best;
}

// min over m in m_grid of max over n in [max(m, n_min), n_max]
inline Ratio dim_p_hat(const RatioTable& t, GridWitness* wit = nullptr) {
    bool have = false;
    Ratio best;
    GridWitness bw;
    for (auto m : t.window.m_grid) {
        std::uint64_t lo = std::max(m, t.window.n_min);
        Ratio inner = t.at(lo);
        std::uint64_t arg = lo;
        for (std::uint64_t n = lo + 1; n <= t.window.n_max; ++n) {
            Ratio r = t.at(n);
            if (r > inner) {
                inner = r;
                arg = n;
            }
        }
        if (!have || inner < best) {
            have = true;
            best = inner;
            bw = {m, arg};
        }
    }
    if (wit) *wit = bw;
    return best;
}

inline Ratio dim_H_hat(const BitSource& a, const Estimator& est, const Window& w, GridWitness* wit = nullptr) {
    return dim_H_hat(RatioTable(a, est, w), wit);
}

inline Ratio dim_p_hat(const BitSource& a, const Estimator& est, const Window& w, GridWitness* wit = nullptr) {
    return dim_p_hat(RatioTable(a, est, w), wit);
}

// Per-member extrema of one family against one ratio table.
struct MemberWitness {
    std::string member_label;
    std::uint64_t elements = 0;     // family member size inside the window
    Ratio min_ratio{0, 1};
    std::uint64_t argmin = 0;
    Ratio max_ratio{0, 1};
    std::uint64_t argmax = 0;
};

inline std::vector<MemberWitness> member_witnesses(const RatioTable& t, const IndexFamily& fam) {
    std::vector<MemberWitness> out;
    out.reserve(fam.members.size());
    for (const auto& member : fam.members) {
        auto elems = member.enumerate(t.window.n_min, t.window.n_max);
        if (elems.empty())
            throw exhausted_error("family '" + fam.label + "' member '" + member.label() +
                                  "' has no element in the window");
        MemberWitness w;
        w.member_label = member.label();
        w.elements = elems.size();
        w.min_ratio = w.max_ratio = t.at(elems.front());
        w.argmin = w.argmax = elems.front();
        for (auto n : elems) {
            Ratio r = t.at(n);
            if (r < w.min_ratio) {
                w.min_ratio = r;
                w.argmin = n;
            }
            if (r > w.max_ratio) {
                w.max_ratio = r;
                w.argmax = n;
            }
        }
        out.push_back(std::move(w));
    }
    return out;
}

// max over members of min over the member's elements in the window
inline Ratio dim_si_hat(const RatioTable& t, const IndexFamily& fam, std::size_t* member_index = nullptr) {
    auto ws = member_witnesses(t, fam);
    std::size_t best = 0;
    for (std::size_t i = 1; i < ws.size(); ++i)
        if (ws[i].min_ratio > ws[best].min_ratio) best = i;
    if (member_index) *member_index = best;
    return ws[best].min_ratio;
}

// min over members of max over the member's elements in the window
inline Ratio dim_is_hat(const RatioTable& t, const IndexFamily& fam, std::size_t* member_index = nullptr) {
    auto ws = member_witnesses(t, fam);
    std::size_t best = 0;
    for (std::size_t i = 1; i < ws.size(); ++i)
        if (ws[i].max_ratio < ws[best].max_ratio) best = i;
    if (member_index) *member_index = best;
    return ws[best].max_ratio;
}

inline Ratio dim_si_hat(const BitSource& a, const Estimator& est, const IndexFamily& fam, const Window& w) {
    return dim_si_hat(RatioTable(a, est, w), fam);
}

inline Ratio dim_is_hat(const BitSource& a, const Estimator& est, const IndexFamily& fam, const Window& w) {
    return dim_is_hat(RatioTable(a, est, w), fam);
}

struct DimensionProfile {
    std::string source_spec;
    std::string estimator_name;
    std::string family_label;
    Window window;
    Ratio dim_h, dim_p, dim_si, dim_is;
    GridWitness h_witness, p_witness;
    std::vector<MemberWitness> members;
    std::size_t si_member = 0;  // index into members deciding dim_si
    std::size_t is_member = 0;  // index into members deciding dim_is
};

inline DimensionProfile profile(const BitSource& a, const Estimator& est, const IndexFamily& fam, const Window& w) {
    RatioTable t(a, est, w);
    DimensionProfile p;
    p.source_spec = t.source_spec;
    p.estimator_name = t.estimator_name;
    p.family_label = fam.label;
    p.window = w;
    p.dim_h = dim_H_hat(t, &p.h_witness);
    p.dim_p = dim_p_hat(t, &p.p_witness);
    p.members = member_witnesses(t, fam);
    p.si_member = 0;
    p.is_member = 0;
    for (std::size_t i = 1; i < p.members.size(); ++i) {
        if (p.members[i].min_ratio > p.members[p.si_member].min_ratio) p.si_member = i;
        if (p.members[i].max_ratio < p.members[p.is_member].max_ratio) p.is_member = i;
    }
    p.dim_si = p.members[p.si_member].min_ratio;
    p.dim_is = p.members[p.is_member].max_ratio;
    return p;
}

}  // namespace bitdim
