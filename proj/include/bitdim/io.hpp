#pragma once

#include <bitdim/complexity.hpp>
#include <bitdim/constructions.hpp>
#include <bitdim/core.hpp>
#include <bitdim/families.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bitdim {

struct config_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

// Ordered key=value store. Order is preserved so a serialized map is stable,
// which is what makes manifests replay byte-identical.
class ConfigMap {
public:
    static ConfigMap parse(const std::string& text) {
        ConfigMap m;
        std::size_t pos = 0;
        std::uint64_t lineno = 0;
        while (pos <= text.size()) {
            std::size_t eol = text.find('\n', pos);
            std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
            pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            std::size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (key.empty()) throw config_error("config line " + std::to_string(lineno) + ": empty key");
            if (m.has(key)) throw config_error("config: duplicate key '" + key + "'");
            m.entries_.emplace_back(std::move(key), std::move(value));
        }
        return m;
    }

    std::string serialize() const {
        std::string out;
        for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
        return out;
    }

    bool has(const std::string& key) const {
        for (const auto& [k, v] : entries_)
            if (k == key) return true;
        return false;
    }

    const std::string& require(const std::string& key) const {
        for (const auto& [k, v] : entries_)
            if (k == key) return v;
        throw config_error("config: missing key '" + key + "'");
    }

    std::string get_or(const std::string& key, std::string fallback) const {
        for (const auto& [k, v] : entries_)
            if (k == key) return v;
        return fallback;
    }

    std::uint64_t require_u64(const std::string& key) const { return to_u64(key, require(key)); }

    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? require_u64(key) : fallback;
    }

    void set(const std::string& key, std::string value) {
        for (auto& [k, v] : entries_)
            if (k == key) {
                v = std::move(value);
                return;
            }
        entries_.emplace_back(key, std::move(value));
    }

    // Unknown keys are rejected, not ignored: a typo must not silently change
    // what a run means.
    void allow_only(const std::vector<std::string>& keys) const {
        for (const auto& [k, v] : entries_) {
            bool ok = false;
            for (const auto& a : keys)
                if (k == a) ok = true;
            if (!ok) throw config_error("config: unknown key '" + k + "'");
        }
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    static std::uint64_t to_u64(const std::string& key, const std::string& value) {
        if (value.empty()) throw config_error("config: key '" + key + "' is not a number");
        std::uint64_t out = 0;
        for (char c : value) {
            if (c < '0' || c > '9') throw config_error("config: key '" + key + "' is not a number");
            std::uint64_t d = static_cast<std::uint64_t>(c - '0');
            if (out > (~0ull - d) / 10) throw config_error("config: key '" + key + "' overflows");
            out = out * 10 + d;
        }
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        std::size_t e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::vector<std::pair<std::string, std::string>> entries_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

// Write-then-rename so readers never see a half-written file and failed runs
// leave no partial artifact behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw io_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string bits_to_text(const BitWord& w) {
    if (w.empty()) return "";
    return w.to_string() + "\n";
}

inline BitWord text_to_bits(const std::string& text) {
    std::vector<std::uint8_t> v;
    for (char c : text) {
        if (c == '0' || c == '1')
            v.push_back(static_cast<std::uint8_t>(c - '0'));
        else if (c != ' ' && c != '\n' && c != '\r' && c != '\t')
            throw io_error("bit file: unexpected character");
    }
    BitWord w;
    for (auto b : v) w.push_back(b);
    return w;
}

namespace detail {

// "head:rest" -> (head, rest); no colon -> (s, nullopt).
inline std::pair<std::string, std::optional<std::string>> split_head(const std::string& s) {
    std::size_t c = s.find(':');
    if (c == std::string::npos) return {s, std::nullopt};
    return {s.substr(0, c), s.substr(c + 1)};
}

inline std::vector<std::uint64_t> parse_u64_list(const std::string& what, const std::string& s) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        out.push_back(ConfigMap::to_u64(what, item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw config_error(what + ": empty list");
    return out;
}

}  // namespace detail

// constant:V | periodic:PATTERN | pseudorandom[:SEED] | file:PATH. The bare
// pseudorandom form takes its seed from the run config so one --seed flag
// steers every seedless source in it.
inline BitSource parse_source(const std::string& s, std::optional<std::uint64_t> default_seed = std::nullopt) {
    auto [head, rest] = detail::split_head(s);
    if (head == "constant") {
        if (!rest) throw config_error("source 'constant' needs a value");
        std::uint64_t v = ConfigMap::to_u64("constant", *rest);
        if (v > 1) throw config_error("source 'constant' value must be 0 or 1");
        return constant_source(static_cast<int>(v));
    }
    if (head == "periodic") {
        if (!rest || rest->empty()) throw config_error("source 'periodic' needs a pattern");
        return periodic_source(BitWord::from_string(*rest));
    }
    if (head == "pseudorandom") {
        if (rest) return pseudorandom_source(ConfigMap::to_u64("pseudorandom", *rest));
        if (!default_seed) throw config_error("source 'pseudorandom' needs a seed (or set the seed key)");
        return pseudorandom_source(*default_seed);
    }
    if (head == "file") {
        if (!rest || rest->empty()) throw config_error("source 'file' needs a path");
        return word_source(text_to_bits(read_file(*rest)), "kind=file path=" + *rest);
    }
    throw config_error("unknown source '" + s + "'");
}

inline EstimatorPtr parse_estimator(const std::string& s) {
    if (s == "identity") return make_identity_estimator();
    if (s == "ceiling") return make_ceiling_estimator();
    if (s == "compressor") return make_compressor_estimator();
    throw config_error("unknown estimator '" + s + "'");
}

// squares[:C] | compressed | explicit:V1,V2,...
inline SegmentSchedule parse_schedule(const std::string& s) {
    auto [head, rest] = detail::split_head(s);
    if (head == "squares") return squares_schedule(rest ? ConfigMap::to_u64("squares", *rest) : 1);
    if (head == "compressed") {
        if (rest) throw config_error("schedule 'compressed' takes no parameter");
        return compressed_schedule();
    }
    if (head == "explicit") {
        if (!rest) throw config_error("schedule 'explicit' needs boundaries");
        return explicit_schedule(detail::parse_u64_list("explicit", *rest));
    }
    throw config_error("unknown schedule '" + s + "'");
}

// full | empty | residue:M:R | prefix-code:SOURCE
inline GuideSet parse_guide(const std::string& s, std::optional<std::uint64_t> default_seed = std::nullopt) {
    auto [head, rest] = detail::split_head(s);
    if (head == "full") return full_guide();
    if (head == "empty") return empty_guide();
    if (head == "residue") {
        if (!rest) throw config_error("guide 'residue' needs modulus:residue");
        auto [m, r] = detail::split_head(*rest);
        if (!r) throw config_error("guide 'residue' needs modulus:residue");
        return residue_guide(ConfigMap::to_u64("residue modulus", m), ConfigMap::to_u64("residue", *r));
    }
    if (head == "prefix-code") {
        if (!rest) throw config_error("guide 'prefix-code' needs a source");
        return prefix_code_guide(parse_source(*rest, default_seed));
    }
    throw config_error("unknown guide '" + s + "'");
}

inline RateFunction parse_rate(const std::string& s) {
    if (s == "identity") return identity_rate();
    if (s == "square") return square_rate();
    throw config_error("unknown rate '" + s + "'");
}

// naturals | progression:A:D | geometric:A:R | list:V1,V2,... |
// prefix-code:SOURCE | tail:M:SET
inline IndexSet parse_index_set(const std::string& s, std::optional<std::uint64_t> default_seed = std::nullopt) {
    auto [head, rest] = detail::split_head(s);
    if (head == "naturals") return naturals();
    if (head == "progression") {
        if (!rest) throw config_error("set 'progression' needs start:step");
        auto [a, d] = detail::split_head(*rest);
        if (!d) throw config_error("set 'progression' needs start:step");
        return arithmetic_progression(ConfigMap::to_u64("progression start", a), ConfigMap::to_u64("progression step", *d));
    }
    if (head == "geometric") {
        if (!rest) throw config_error("set 'geometric' needs base:ratio");
        auto [a, r] = detail::split_head(*rest);
        if (!r) throw config_error("set 'geometric' needs base:ratio");
        return geometric(ConfigMap::to_u64("geometric base", a), ConfigMap::to_u64("geometric ratio", *r));
    }
    if (head == "list") {
        if (!rest) throw config_error("set 'list' needs elements");
        return from_list(detail::parse_u64_list("list", *rest));
    }
    if (head == "prefix-code") {
        if (!rest) throw config_error("set 'prefix-code' needs a source");
        return prefix_code_set(parse_source(*rest, default_seed));
    }
    if (head == "tail") {
        if (!rest) throw config_error("set 'tail' needs drop:set");
        auto [m, inner] = detail::split_head(*rest);
        if (!inner) throw config_error("set 'tail' needs drop:set");
        return tail(parse_index_set(*inner, default_seed), ConfigMap::to_u64("tail drop", m));
    }
    throw config_error("unknown index set '" + s + "'");
}

// Family manifest file: optional 'label =', one 'member =' per index set,
// 'cofinite-tails =' for a batch of tail members. At least one member.
inline IndexFamily parse_family(const std::string& text, std::optional<std::uint64_t> default_seed = std::nullopt) {
    ConfigMap lines;
    std::string label = "family";
    std::vector<IndexSet> members;
    std::size_t pos = 0;
    std::uint64_t lineno = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++lineno;
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        std::string t = line.substr(b, e - b + 1);
        if (t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("family line " + std::to_string(lineno) + ": expected key = value");
        std::string key = t.substr(0, eq);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::string value = t.substr(eq + 1);
        std::size_t vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb);
        if (key == "label") {
            label = value;
        } else if (key == "member") {
            members.push_back(parse_index_set(value, default_seed));
        } else if (key == "cofinite-tails") {
            for (auto& m : cofinite_tails(detail::parse_u64_list("cofinite-tails", value)).members)
                members.push_back(std::move(m));
        } else {
            throw config_error("family line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (members.empty()) throw config_error("family manifest has no members");
    return IndexFamily(std::move(label), std::move(members));
}

inline IndexFamily load_family(const std::filesystem::path& path,
                               std::optional<std::uint64_t> default_seed = std::nullopt) {
    return parse_family(read_file(path), default_seed);
}

// RFC-4180 style quoting, applied only when the cell needs it.
inline std::string csv_cell(const std::string& s) {
    bool needs = false;
    for (char c : s)
        if (c == ',' || c == '"' || c == '\n') needs = true;
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_cell(cells[i]);
    }
    out += '\n';
    return out;
}

}  // namespace bitdim
