#include <bitdim/constructions.hpp>
#include <bitdim/dimensions.hpp>
#include <bitdim/io.hpp>
#include <bitdim/reductions.hpp>
#include <bitdim/toy_machine.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
using namespace bitdim;

namespace {

constexpr const char* kSchemaVersion = "bitdim.artifacts/1";

// Shortest round-trip decimal, stable across runs of the same binary.
std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

std::string u128_to_string(unsigned __int128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v) {
        s += static_cast<char>('0' + static_cast<int>(v % 10));
        v /= 10;
    }
    return std::string(s.rbegin(), s.rend());
}

json ratio_json(const Ratio& r) {
    return json{{"num", r.num}, {"den", r.den}, {"value", r.value()}};
}

struct Run {
    ConfigMap cfg;       // resolved key=value state; serialized as the manifest
    std::string stem;    // artifact path prefix from --out
    std::vector<std::string> written;

    std::string resolve(const std::string& key, const std::string& fallback) {
        std::string v = cfg.get_or(key, fallback);
        cfg.set(key, v);
        return v;
    }

    std::uint64_t resolve_u64(const std::string& key, std::uint64_t fallback) {
        std::uint64_t v = cfg.get_u64_or(key, fallback);
        cfg.set(key, std::to_string(v));
        return v;
    }

    std::uint64_t require_u64(const std::string& key) { return cfg.require_u64(key); }

    std::optional<std::uint64_t> seed() {
        if (!cfg.has("seed")) return std::nullopt;
        return cfg.require_u64("seed");
    }

    void emit(const std::string& suffix, const std::string& content) {
        std::string path = stem + suffix;
        write_file_atomic(path, content);
        written.push_back(path);
    }

    // The manifest goes last: artifacts without one mark an aborted run.
    void finish() {
        emit(".manifest", cfg.serialize());
        for (const auto& p : written) std::cout << p << "\n";
    }
};

BitSource run_source(Run& run, const std::string& key, const std::string& fallback) {
    return parse_source(run.resolve(key, fallback), run.seed());
}

// Default family: cofinite tails whose deepest start reaches the deepest
// grid window, so the four functionals order exactly for every source.
IndexFamily run_family(Run& run, std::uint64_t horizon, std::uint64_t n_min) {
    std::vector<std::uint64_t> starts{0, n_min, horizon / 4};
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    std::string def = "cofinite-tails:";
    for (std::size_t i = 0; i < starts.size(); ++i) def += (i ? "," : "") + std::to_string(starts[i]);
    std::string spec = run.resolve("family", def);
    auto [head, rest] = detail::split_head(spec);
    if (head == "file") {
        if (!rest || rest->empty()) throw config_error("family 'file' needs a path");
        return load_family(*rest, run.seed());
    }
    if (head == "cofinite-tails") {
        if (!rest) throw config_error("family 'cofinite-tails' needs start points");
        return cofinite_tails(detail::parse_u64_list("cofinite-tails", *rest));
    }
    throw config_error("unknown family '" + spec + "'");
}

// Shallowest ell table whose last boundary clears the horizon.
EllLambda ell_for_horizon(const RateFunction& rate, std::uint64_t horizon) {
    for (std::uint64_t k = 2; k <= 64; ++k) {
        EllLambda el = ell_lambda(rate, k);
        if (el.ell.back() > BigInt(horizon)) return el;
    }
    throw horizon_too_deep_error("no ell boundary clears the horizon within 64 steps");
}

// builder = source | alternating | double-segment | triple-guided | generic
void cmd_construct(Run& run) {
    std::string builder = run.resolve("builder", "source");

    std::vector<std::string> allowed = {"command", "builder", "horizon", "seed", "source"};
    if (builder == "alternating") {
        allowed.push_back("schedule");
    } else if (builder == "double-segment") {
        allowed.insert(allowed.end(), {"schedule", "guide", "mode"});
    } else if (builder == "triple-guided") {
        allowed.insert(allowed.end(), {"rate", "guide"});
    } else if (builder == "generic") {
        for (const auto& [k, v] : run.cfg.entries())
            if (k.rfind("requirement-", 0) == 0) allowed.push_back(k);
    } else if (builder != "source") {
        throw config_error("unknown builder '" + builder + "'");
    }
    run.cfg.allow_only(allowed);

    std::uint64_t horizon = run.require_u64("horizon");
    BitSource built = constant_source(0);

    if (builder == "source") {
        built = run_source(run, "source", "pseudorandom");
    } else if (builder == "alternating") {
        SegmentSchedule sched = parse_schedule(run.resolve("schedule", "squares"));
        built = build_alternating(run_source(run, "source", "pseudorandom"), sched);
    } else if (builder == "double-segment") {
        SegmentSchedule sched = parse_schedule(run.resolve("schedule", "squares"));
        GuideSet x0 = parse_guide(run.resolve("guide", "full"), run.seed());
        std::string mode = run.resolve("mode", "si-zero");
        DoubleSegmentMode m;
        if (mode == "si-zero")
            m = DoubleSegmentMode::si_zero;
        else if (mode == "is-random")
            m = DoubleSegmentMode::is_random;
        else
            throw config_error("unknown mode '" + mode + "'");
        built = build_double_segment(run_source(run, "source", "pseudorandom"), x0, sched, m);
    } else if (builder == "triple-guided") {
        RateFunction rate = parse_rate(run.resolve("rate", "identity"));
        GuideSet s0 = parse_guide(run.resolve("guide", "full"), run.seed());
        EllLambda el = ell_for_horizon(rate, horizon);
        built = build_triple_guided(run_source(run, "source", "pseudorandom"), s0, el, rate.label);
    } else {
        std::vector<Requirement> bank;
        for (const auto& [k, v] : run.cfg.entries()) {
            if (k.rfind("requirement-", 0) != 0) continue;
            auto [label, rest] = detail::split_head(v);
            if (!rest) throw config_error("requirement '" + k + "' needs label:polarity:set");
            auto [pol, set] = detail::split_head(*rest);
            if (!set) throw config_error("requirement '" + k + "' needs label:polarity:set");
            Polarity p;
            if (pol == "compressible")
                p = Polarity::compressible;
            else if (pol == "incompressible")
                p = Polarity::incompressible;
            else
                throw config_error("requirement '" + k + "': unknown polarity '" + pol + "'");
            bank.push_back({label, parse_index_set(*set, run.seed()), p});
        }
        if (bank.empty()) throw config_error("builder 'generic' needs requirement-N keys");
        GenericBuild gb = build_generic_like(bank, horizon, run_source(run, "source", "pseudorandom"));
        built = gb.source;
        std::string csv = csv_row({"requirement", "met_at_length", "polarity"});
        for (const auto& e : gb.log)
            csv += csv_row({e.requirement, std::to_string(e.met_at_length),
                            e.polarity == Polarity::compressible ? "compressible" : "incompressible"});
        run.emit(".meetings.csv", csv);
    }

    run.emit(".bits", bits_to_text(prefix(built, horizon)));
    run.finish();
}

void cmd_profile(Run& run) {
    run.cfg.allow_only({"command", "source", "estimator", "horizon", "window-nmin", "family", "seed"});
    std::uint64_t horizon = run.require_u64("horizon");
    std::uint64_t n_min = run.resolve_u64("window-nmin", 64);
    BitSource a = run_source(run, "source", "pseudorandom");
    EstimatorPtr est = parse_estimator(run.resolve("estimator", "compressor"));
    IndexFamily fam = run_family(run, horizon, n_min);
    Window w = default_window(horizon, n_min);

    RatioTable table(a, *est, w);
    DimensionProfile p = profile(a, *est, fam, w);

    std::string curve = csv_row({"n", "estimate", "ratio"});
    for (std::uint64_t n = 1; n <= w.n_max; ++n)
        curve += csv_row({std::to_string(n), std::to_string(table.estimates[n]), format_double(table.at(n).value())});
    run.emit(".curve.csv", curve);

    std::string members = csv_row({"member", "elements", "min_ratio", "argmin", "max_ratio", "argmax"});
    for (const auto& m : p.members)
        members += csv_row({m.member_label, std::to_string(m.elements), format_double(m.min_ratio.value()),
                            std::to_string(m.argmin), format_double(m.max_ratio.value()), std::to_string(m.argmax)});
    run.emit(".members.csv", members);

    bool chain_ok = !(p.dim_is < p.dim_h) && !(p.dim_p < p.dim_is) && !(p.dim_si < p.dim_h) && !(p.dim_p < p.dim_si);
    json j{{"schema", kSchemaVersion},
           {"source", p.source_spec},
           {"estimator", p.estimator_name},
           {"family", p.family_label},
           {"window", json{{"n_min", w.n_min}, {"n_max", w.n_max}, {"m_grid", w.m_grid}}},
           {"dim_h", ratio_json(p.dim_h)},
           {"dim_p", ratio_json(p.dim_p)},
           {"dim_si", ratio_json(p.dim_si)},
           {"dim_is", ratio_json(p.dim_is)},
           {"h_witness", json{{"m", p.h_witness.m}, {"n", p.h_witness.n}}},
           {"p_witness", json{{"m", p.p_witness.m}, {"n", p.p_witness.n}}},
           {"si_member", p.members[p.si_member].member_label},
           {"is_member", p.members[p.is_member].member_label},
           {"chain_ok", chain_ok}};
    run.emit(".profile.json", j.dump(2) + "\n");
    run.finish();
}

void cmd_transduce(Run& run) {
    run.cfg.allow_only({"command", "track0", "track1", "stages", "estimator", "seed"});
    std::uint64_t stages = run.require_u64("stages");
    BitSource a0 = run_source(run, "track0", "constant:0");
    BitSource a1 = run_source(run, "track1", "pseudorandom");
    EstimatorPtr est = parse_estimator(run.resolve("estimator", "compressor"));

    TransducerState st;
    if (stages > 0) st = transduce(a0, a1, stages, *est);

    run.emit(".bits", bits_to_text(st.output));

    std::string sw = csv_row({"stage", "from_track", "trigger_n", "deficiency"});
    for (const auto& e : st.switches)
        sw += csv_row({std::to_string(e.stage), std::to_string(e.from_track), std::to_string(e.trigger_n),
                       std::to_string(e.deficiency)});
    run.emit(".switches.csv", sw);

    json j{{"schema", kSchemaVersion},
           {"track0", a0.spec()},
           {"track1", a1.spec()},
           {"estimator", est->name()},
           {"stages", stages},
           {"output_length", st.output.size()},
           {"final_track", st.track},
           {"deficiency", json::array({st.deficiency[0], st.deficiency[1]})},
           {"switch_count", st.switches.size()},
           {"queries", st.stats.queries},
           {"high_water", st.stats.high_water},
           {"bound_respected", st.stats.bound_respected}};
    run.emit(".transduce.json", j.dump(2) + "\n");
    run.finish();
}

void cmd_wtt(Run& run) {
    run.cfg.allow_only({"command", "machine", "oracle", "horizon", "budget", "seed"});
    std::uint64_t horizon = run.require_u64("horizon");
    std::string name = run.resolve("machine", "identity");
    WttMachine m;
    if (name == "identity")
        m = identity_machine();
    else if (name == "bit-repeat")
        m = bit_repeat_machine();
    else if (name == "square-sampler")
        m = square_sampler_machine();
    else
        throw config_error("unknown machine '" + name + "'");
    m.step_budget = run.resolve_u64("budget", m.step_budget);
    BitSource oracle = run_source(run, "oracle", "pseudorandom");

    WttOutcome out = apply_wtt(m, oracle, horizon);

    run.emit(".bits", bits_to_text(out.bits));
    json j{{"schema", kSchemaVersion},
           {"machine", m.label},
           {"oracle", oracle.spec()},
           {"horizon", horizon},
           {"budget", m.step_budget},
           {"total", out.total},
           {"bits_computed", out.bits.size()}};
    j["stalled_at"] = out.total ? json(nullptr) : json(out.stalled_at);
    run.emit(".wtt.json", j.dump(2) + "\n");
    run.finish();
}

void cmd_exactk(Run& run) {
    run.cfg.allow_only({"command", "l-max", "program-cap", "per-program-budget", "total-budget"});
    EnumerationConfig cfg;
    cfg.l_max = static_cast<std::uint32_t>(run.resolve_u64("l-max", 8));
    cfg.program_cap = static_cast<std::uint32_t>(run.resolve_u64("program-cap", cfg.l_max + 6));
    cfg.per_program_budget = run.resolve_u64("per-program-budget", kDefaultStepBudget);
    std::uint64_t total = run.resolve_u64("total-budget", 0);
    cfg.total_step_budget = total == 0 ? ~0ull : total;
    cfg.keep_programs = true;

    Enumeration e = enumerate_machine(ToyPrefixMachine{}, cfg);

    run.emit(".table.txt", e.table.to_text());
    json j{{"schema", kSchemaVersion},
           {"l_max", e.table.l_max},
           {"program_cap", e.program_cap},
           {"entries", e.table.entries.size()},
           {"halting_programs", e.halting_programs.size()},
           {"prefix_free", mutually_prefix_free(e.halting_programs)},
           {"kraft_ok", e.kraft_ok()},
           {"kraft_units", u128_to_string(e.kraft_units)},
           {"kraft_sum", e.kraft_sum()},
           {"exhausted_length", e.exhausted_length},
           {"budget_exhausted", e.budget_exhausted},
           {"total_steps", e.total_steps}};
    run.emit(".exactk.json", j.dump(2) + "\n");
    run.finish();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bit-source dimension laboratory"};
    app.fallthrough(true);
    app.require_subcommand(0, 1);

    std::string config_path, out_stem;
    std::optional<std::uint64_t> seed, horizon, window_nmin, stages;
    std::optional<std::string> estimator, family;
    app.add_option("--config", config_path, "key=value run configuration (a manifest replays)");
    app.add_option("--out", out_stem, "artifact path stem");
    app.add_option("--seed", seed, "seed for seedless pseudorandom specs");
    app.add_option("--horizon", horizon, "prefix length / bit count");
    app.add_option("--estimator", estimator, "identity | ceiling | compressor");
    app.add_option("--family", family, "file:PATH | cofinite-tails:S1,S2,...");
    app.add_option("--window-nmin", window_nmin, "shortest prefix the window scores");
    app.add_option("--stages", stages, "transducer stage count");

    auto* c_construct = app.add_subcommand("construct", "build a bit source and write its prefix");
    auto* c_profile = app.add_subcommand("profile", "estimate the four dimension functionals");
    auto* c_transduce = app.add_subcommand("transduce", "run the two-track switching transducer");
    auto* c_wtt = app.add_subcommand("wtt", "apply a bounded-use oracle machine");
    auto* c_exactk = app.add_subcommand("exactk", "enumerate the toy machine and tabulate exact K");

    CLI11_PARSE(app, argc, argv);

    try {
        Run run;
        if (!config_path.empty()) run.cfg = ConfigMap::parse(read_file(config_path));
        if (seed) run.cfg.set("seed", std::to_string(*seed));
        if (horizon) run.cfg.set("horizon", std::to_string(*horizon));
        if (estimator) run.cfg.set("estimator", *estimator);
        if (family) run.cfg.set("family", *family);
        if (window_nmin) run.cfg.set("window-nmin", std::to_string(*window_nmin));
        if (stages) run.cfg.set("stages", std::to_string(*stages));

        std::string command;
        if (c_construct->parsed()) command = "construct";
        if (c_profile->parsed()) command = "profile";
        if (c_transduce->parsed()) command = "transduce";
        if (c_wtt->parsed()) command = "wtt";
        if (c_exactk->parsed()) command = "exactk";
        if (command.empty()) {
            command = run.cfg.get_or("command", "");
            if (command.empty()) throw config_error("no command: give a subcommand or a config with a command key");
        } else if (run.cfg.has("command") && run.cfg.require("command") != command) {
            throw config_error("config command '" + run.cfg.require("command") + "' contradicts subcommand '" +
                               command + "'");
        }
        run.cfg.set("command", command);

        if (out_stem.empty()) throw config_error("--out is required");
        run.stem = out_stem;

        if (command == "construct")
            cmd_construct(run);
        else if (command == "profile")
            cmd_profile(run);
        else if (command == "transduce")
            cmd_transduce(run);
        else if (command == "wtt")
            cmd_wtt(run);
        else if (command == "exactk")
            cmd_exactk(run);
        else
            throw config_error("unknown command '" + command + "'");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
