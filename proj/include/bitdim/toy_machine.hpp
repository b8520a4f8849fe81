#pragma once

#include <bitdim/complexity.hpp>
#include <bitdim/core.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bitdim {

inline constexpr std::uint64_t kDefaultStepBudget = 1'000'000;
inline constexpr std::uint32_t kDefaultProgramCap = 24;
inline constexpr std::uint32_t kDefaultLMax = 16;
inline constexpr std::uint64_t kStepsPerStage = 10'000;

// Elias gamma code of v >= 1: floor(log2 v) zeros, then v in binary.
inline void gamma_append(BitWord& out, std::uint64_t v) {
    if (v == 0) throw error("gamma_append: value must be >= 1");
    int width = static_cast<int>(std::bit_width(v));
    for (int i = 0; i < width - 1; ++i) out.push_back(0);
    for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<int>((v >> i) & 1));
}

inline std::uint32_t gamma_size(std::uint64_t v) {
    return 2 * static_cast<std::uint32_t>(std::bit_width(v)) - 1;
}

struct MachineResult {
    bool halts = false;
    bool budget_exhausted = false;
    BitWord output;
    std::uint64_t steps = 0;
};

// Fixed loop-free machine with a self-delimiting instruction format. A
// program is valid only when the parse consumes every bit, so no halting
// program is a proper prefix of another.
//   1          + 5-bit L + L raw bits          emit the raw bits
//   00         + gamma(m+1)                    emit m zeros
//   010        + gamma(m+1)                    emit m ones
//   011        + gamma(r+1) + 5-bit L + L bits emit the pattern r times
class ToyPrefixMachine {
public:
    static constexpr const char* kVersion =
        "toy-prefix-v1: LITERAL(1+5+L) ZEROS(00+gamma) ONES(010+gamma) REPEAT(011+gamma+5+L)";

    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (const char* p = kVersion; *p; ++p) {
            h ^= static_cast<unsigned char>(*p);
            h *= 1099511628211ull;
        }
        return h;
    }

    MachineResult run(const BitWord& program, std::uint64_t budget = kDefaultStepBudget) const {
        MachineResult res;
        std::size_t pos = 0;
        auto take = [&](int& bit) {
            if (pos >= program.size() || res.steps >= budget) return false;
            bit = program[pos++];
            ++res.steps;
            return true;
        };
        auto take_fixed = [&](unsigned width, std::uint64_t& value) {
            value = 0;
            for (unsigned i = 0; i < width; ++i) {
                int b;
                if (!take(b)) return false;
                value = (value << 1) | static_cast<std::uint64_t>(b);
            }
            return true;
        };
        auto take_gamma = [&](std::uint64_t& value) {
            unsigned zeros = 0;
            int b;
            for (;;) {
                if (!take(b)) return false;
                if (b == 1) break;
                if (++zeros > 62) return false;
            }
            value = 1;
            for (unsigned i = 0; i < zeros; ++i) {
                if (!take(b)) return false;
                value = (value << 1) | static_cast<std::uint64_t>(b);
            }
            return true;
        };
        auto emit = [&](int bit) {
            if (res.steps >= budget) return false;
            res.output.push_back(bit);
            ++res.steps;
            return true;
        };
        auto emit_run = [&](int bit, std::uint64_t count) {
            for (std::uint64_t i = 0; i < count; ++i)
                if (!emit(bit)) return false;
            return true;
        };

        int b0;
        if (!take(b0)) goto fail;
        if (b0 == 1) {
            std::uint64_t len;
            if (!take_fixed(5, len)) goto fail;
            for (std::uint64_t i = 0; i < len; ++i) {
                int b;
                if (!take(b)) goto fail;
                if (!emit(b)) goto fail;
            }
        } else {
            int b1;
            if (!take(b1)) goto fail;
            if (b1 == 0) {
                std::uint64_t v;
                if (!take_gamma(v)) goto fail;
                if (!emit_run(0, v - 1)) goto fail;
            } else {
                int b2;
                if (!take(b2)) goto fail;
                if (b2 == 0) {
                    std::uint64_t v;
                    if (!take_gamma(v)) goto fail;
                    if (!emit_run(1, v - 1)) goto fail;
                } else {
                    std::uint64_t v, len;
                    if (!take_gamma(v)) goto fail;
                    if (!take_fixed(5, len)) goto fail;
                    BitWord pat;
                    for (std::uint64_t i = 0; i < len; ++i) {
                        int b;
                        if (!take(b)) goto fail;
                        pat.push_back(b);
                    }
                    for (std::uint64_t rep = 0; rep + 1 < v; ++rep)
                        for (std::size_t i = 0; i < pat.size(); ++i)
                            if (!emit(pat[i])) goto fail;
                }
            }
        }
        if (pos != program.size()) goto fail;
        res.halts = true;
        return res;
    fail:
        res.budget_exhausted = res.steps >= budget;
        res.halts = false;
        res.output = BitWord();
        return res;
    }

    // Every valid program of the given length, in a fixed deterministic
    // order (zeros, ones, repeat, literal; numeric order within each).
    std::vector<BitWord> programs_of_length(std::uint32_t length) const {
        std::vector<BitWord> out;
        auto gamma_values_of_size = [](std::uint32_t g, std::vector<std::uint64_t>& vs) {
            vs.clear();
            if (g % 2 == 0 || g > 63) return;
            std::uint32_t w = (g + 1) / 2;
            std::uint64_t lo = w == 1 ? 1 : (1ull << (w - 1));
            std::uint64_t hi = (1ull << w);
            for (std::uint64_t v = lo; v < hi; ++v) vs.push_back(v);
        };
        std::vector<std::uint64_t> vs;
        // zeros: 2 + g
        if (length >= 3) {
            gamma_values_of_size(length - 2, vs);
            for (auto v : vs) {
                BitWord p;
                p.push_back(0);
                p.push_back(0);
                gamma_append(p, v);
                out.push_back(std::move(p));
            }
        }
        // ones: 3 + g
        if (length >= 4) {
            gamma_values_of_size(length - 3, vs);
            for (auto v : vs) {
                BitWord p;
                p.push_back(0);
                p.push_back(1);
                p.push_back(0);
                gamma_append(p, v);
                out.push_back(std::move(p));
            }
        }
        // repeat: 3 + g + 5 + L
        if (length >= 9) {
            for (std::uint32_t g = 1; g + 8 <= length; g += 2) {
                std::uint32_t L = length - 8 - g;
                if (L > 31) continue;
                gamma_values_of_size(g, vs);
                for (auto v : vs)
                    for (std::uint64_t pat = 0; pat < (1ull << L); ++pat) {
                        BitWord p;
                        p.push_back(0);
                        p.push_back(1);
                        p.push_back(1);
                        gamma_append(p, v);
                        for (int i = 4; i >= 0; --i) p.push_back(static_cast<int>((L >> i) & 1));
                        for (int i = static_cast<int>(L) - 1; i >= 0; --i)
                            p.push_back(static_cast<int>((pat >> i) & 1));
                        out.push_back(std::move(p));
                    }
            }
        }
        // literal: 1 + 5 + L
        if (length >= 6 && length - 6 <= 31) {
            std::uint32_t L = length - 6;
            for (std::uint64_t pat = 0; pat < (1ull << L); ++pat) {
                BitWord p;
                p.push_back(1);
                for (int i = 4; i >= 0; --i) p.push_back(static_cast<int>((L >> i) & 1));
                for (int i = static_cast<int>(L) - 1; i >= 0; --i) p.push_back(static_cast<int>((pat >> i) & 1));
                out.push_back(std::move(p));
            }
        }
        return out;
    }
};

struct TableEntry {
    std::uint64_t value = 0;
    std::uint64_t stage = 0;
};

// Upper bounds on program length per output word, keyed by encode_word.
// Values only ever decrease when tables merge.
class ComplexityTable {
public:
    std::uint64_t machine_hash = 0;
    std::uint32_t l_max = kDefaultLMax;
    std::map<std::uint64_t, TableEntry> entries;

    std::optional<TableEntry> lookup(const BitWord& w) const {
        auto it = entries.find(encode_word(w));
        if (it == entries.end()) return std::nullopt;
        return it->second;
    }

    void record(const BitWord& w, std::uint64_t value, std::uint64_t stage) {
        auto key = encode_word(w);
        auto it = entries.find(key);
        if (it == entries.end()) {
            entries[key] = TableEntry{value, stage};
        } else if (value < it->second.value) {
            it->second = TableEntry{value, stage};
        }
    }

    void merge(const ComplexityTable& other) {
        if (other.machine_hash != machine_hash) throw error("table merge: machine hash mismatch");
        for (const auto& [key, e] : other.entries) {
            auto it = entries.find(key);
            if (it == entries.end() || e.value < it->second.value)
                entries[key] = e;
        }
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "machine " << std::hex << machine_hash << std::dec << " lmax " << l_max << "\n";
        for (const auto& [key, e] : entries)
            os << std::hex << key << std::dec << " " << e.value << " " << e.stage << "\n";
        return os.str();
    }

    static ComplexityTable from_text(const std::string& text) {
        ComplexityTable t;
        std::istringstream is(text);
        std::string word;
        if (!(is >> word) || word != "machine") throw error("table parse: missing machine header");
        if (!(is >> std::hex >> t.machine_hash >> std::dec)) throw error("table parse: bad hash");
        if (!(is >> word) || word != "lmax" || !(is >> t.l_max)) throw error("table parse: bad lmax");
        std::uint64_t key, value, stage;
        while (is >> std::hex >> key >> std::dec >> value >> stage)
            t.entries[key] = TableEntry{value, stage};
        return t;
    }
};

struct EnumerationConfig {
    std::uint32_t program_cap = kDefaultProgramCap;
    std::uint32_t l_max = kDefaultLMax;
    std::uint64_t per_program_budget = kDefaultStepBudget;
    std::uint64_t total_step_budget = ~0ull;
    bool keep_programs = false;
};

struct Enumeration {
    ComplexityTable table;
    std::vector<BitWord> halting_programs;  // populated only when keep_programs
    unsigned __int128 kraft_units = 0;      // sum of 2^(cap - |p|)
    std::uint32_t program_cap = 0;
    std::uint32_t exhausted_length = 0;  // all programs of length <= this ran to completion
    std::uint64_t total_steps = 0;
    bool budget_exhausted = false;

    bool kraft_ok() const { return kraft_units <= (static_cast<unsigned __int128>(1) << program_cap); }
    double kraft_sum() const {
        return static_cast<double>(static_cast<long double>(kraft_units) /
                                   static_cast<long double>(static_cast<unsigned __int128>(1) << program_cap));
    }
};

// Length-major sweep over valid programs. Discovery stages are derived from
// the cumulative interpreter step count, so later snapshots only improve.
inline Enumeration enumerate_machine(const ToyPrefixMachine& m, EnumerationConfig cfg = {}) {
    Enumeration e;
    e.table.machine_hash = m.hash();
    e.table.l_max = cfg.l_max;
    e.program_cap = cfg.program_cap;
    for (std::uint32_t len = 1; len <= cfg.program_cap; ++len) {
        for (auto& p : m.programs_of_length(len)) {
            if (e.total_steps >= cfg.total_step_budget) {
                e.budget_exhausted = true;
                return e;
            }
            auto r = m.run(p, cfg.per_program_budget);
            e.total_steps += r.steps;
            if (!r.halts) continue;
            e.kraft_units += static_cast<unsigned __int128>(1) << (cfg.program_cap - len);
            if (r.output.size() <= cfg.l_max) {
                std::uint64_t stage = e.total_steps / kStepsPerStage + 1;
                e.table.record(r.output, len, stage);
            }
            if (cfg.keep_programs) e.halting_programs.push_back(std::move(p));
        }
        e.exhausted_length = len;
    }
    return e;
}

// No entry is a prefix of a different entry (duplicates count as a clash).
// After a lexicographic sort any prefix pair sits adjacent, so one pass
// over neighbors decides.
inline bool mutually_prefix_free(const std::vector<BitWord>& words) {
    std::vector<std::string> s;
    s.reserve(words.size());
    for (const auto& w : words) s.push_back(w.to_string());
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i].size() <= s[i + 1].size() && s[i + 1].compare(0, s[i].size(), s[i]) == 0) return false;
    return true;
}

struct ExactK {
    std::uint64_t value = 0;
    bool exact = false;
    std::uint64_t stage = 0;
};

// Shortest-program length from a finished sweep. A table hit is exact
// because the sweep is length-major: everything shorter already ran. A miss
// falls back to the literal-program upper bound, flagged inexact.
inline ExactK exact_K(const BitWord& w, const Enumeration& e) {
    if (w.size() > e.table.l_max) throw invalid_range_error("exact_K: word longer than table l_max");
    if (auto hit = e.table.lookup(w)) return ExactK{hit->value, true, hit->stage};
    if (w.size() <= 31) return ExactK{w.size() + 6, false, 0};
    return ExactK{length_ceiling(w.size()), false, 0};
}

// Estimator backed by a finished enumeration. Requires the sweep to have
// covered every word up to l_max (cap >= l_max + 6, not budget-truncated).
class MachineEstimator final : public Estimator {
public:
    explicit MachineEstimator(Enumeration e) : enum_(std::move(e)) {
        if (enum_.budget_exhausted || enum_.exhausted_length < enum_.table.l_max + 6)
            throw error("MachineEstimator: enumeration did not cover l_max");
    }

    std::string name() const override { return "machine"; }

    std::uint64_t estimate(const BitWord& w) const override {
        if (w.size() > enum_.table.l_max) return length_ceiling(w.size());
        auto hit = enum_.table.lookup(w);
        if (!hit) throw error("MachineEstimator: word missing from finished table");
        return std::min(hit->value, length_ceiling(w.size()));
    }

    std::uint64_t staged_estimate(const BitWord& w, std::uint64_t stage) const override {
        std::uint64_t ceil = length_ceiling(w.size());
        if (w.size() > enum_.table.l_max) return ceil;
        auto hit = enum_.table.lookup(w);
        if (hit && hit->stage <= stage) return std::min(hit->value, ceil);
        return ceil;
    }

    const Enumeration& enumeration() const { return enum_; }

private:
    Enumeration enum_;
};

}  // namespace bitdim
