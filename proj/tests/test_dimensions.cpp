#include <bitdim/complexity.hpp>
#include <bitdim/constructions.hpp>
#include <bitdim/core.hpp>
#include <bitdim/dimensions.hpp>
#include <bitdim/families.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace bitdim;

namespace {

// a/b - c/d <= e/f - g/h, exactly
bool diff_le(Ratio a, Ratio c, Ratio e, Ratio g) {
    __int128 lhs = (__int128)a.num * c.den - (__int128)c.num * a.den;
    __int128 rhs = (__int128)e.num * g.den - (__int128)g.num * e.den;
    return lhs * (__int128)e.den * g.den <= rhs * (__int128)a.den * c.den;
}

}  // namespace

TEST_CASE("default window uses a power-of-two tail grid") {
    Window w = default_window(1ull << 13);
    REQUIRE(w.m_grid.size() == 12);
    CHECK(w.m_grid.front() == 1);
    CHECK(w.m_grid.back() == 2048);
    CHECK(w.n_min == 64);
    CHECK_NOTHROW(w.validate());
}

TEST_CASE("window validation rejects malformed shapes") {
    Window w;
    w.n_min = 0;
    w.n_max = 128;
    w.m_grid = {1};
    CHECK_THROWS_AS(w.validate(), error);
    w.n_min = 64;
    w.m_grid.clear();
    CHECK_THROWS_AS(w.validate(), error);
    w.m_grid = {128};
    CHECK_THROWS_AS(w.validate(), error);
    w.m_grid = {127};
    CHECK_NOTHROW(w.validate());
}

TEST_CASE("identity estimator pins every functional to one") {
    Window w = default_window(1ull << 10);
    auto ident = make_identity_estimator();
    RatioTable t(pseudorandom_source(7), *ident, w);
    CHECK(dim_H_hat(t) == (Ratio{1, 1}));
    CHECK(dim_p_hat(t) == (Ratio{1, 1}));
    IndexFamily nat("naturals-only", {naturals()});
    CHECK(dim_si_hat(t, nat) == (Ratio{1, 1}));
    CHECK(dim_is_hat(t, nat) == (Ratio{1, 1}));
    DimensionProfile p = profile(pseudorandom_source(7), *ident, nat, w);
    CHECK(p.dim_h == p.dim_p);
    CHECK(p.dim_si == p.dim_is);
}

TEST_CASE("ceiling estimator ratios decay toward two from above") {
    Window w = default_window(4096);
    RatioTable t(constant_source(0), *make_ceiling_estimator(), w);
    CHECK(dim_H_hat(t) == (Ratio{2 * 4096 + 48, 4096}));
    CHECK(dim_p_hat(t) == (Ratio{2 * 1024 + 48, 1024}));
}

TEST_CASE("all-zero source compresses to the noise floor") {
    Window w = default_window(1ull << 13);
    RatioTable t(constant_source(0), *make_compressor_estimator(), w);
    GridWitness hw, pw;
    CHECK(dim_H_hat(t, &hw) == (Ratio{24, 8192}));
    CHECK(hw.m == 1);
    CHECK(hw.n == 8192);
    CHECK(dim_p_hat(t, &pw) == (Ratio{23, 2048}));
    CHECK(pw.m == 2048);
    CHECK(pw.n == 2048);
}

TEST_CASE("pseudorandom source scores near one on both grid functionals") {
    Window w = default_window(1ull << 13);
    RatioTable t(pseudorandom_source(7), *make_compressor_estimator(), w);
    CHECK(dim_H_hat(t) == (Ratio{8247, 8192}));
    CHECK(dim_p_hat(t) == (Ratio{2100, 2053}));
    CHECK(dim_p_hat(t).value() >= 0.8);
}

TEST_CASE("single-member family collapses to the grid extrema") {
    Window w = default_window(1ull << 12);
    w.m_grid = {0};
    RatioTable t(pseudorandom_source(3), *make_compressor_estimator(), w);
    IndexFamily nat("naturals-only", {naturals()});
    CHECK(dim_si_hat(t, nat) == dim_H_hat(t));
    CHECK(dim_is_hat(t, nat) == dim_p_hat(t));
}

TEST_CASE("chain inequality holds exactly when the family contains the grid tails") {
    Window w = default_window(1ull << 13);
    auto comp = make_compressor_estimator();
    std::vector<BitSource> sources;
    for (std::uint64_t s = 1; s <= 8; ++s) sources.push_back(pseudorandom_source(s));
    sources.push_back(constant_source(0));
    sources.push_back(constant_source(1));
    sources.push_back(periodic_source(BitWord::from_string("01")));
    sources.push_back(periodic_source(BitWord::from_string("0010111011")));
    sources.push_back(build_alternating(pseudorandom_source(7), squares_schedule()));
    sources.push_back(build_alternating(pseudorandom_source(3), compressed_schedule()));
    IndexFamily fam = cofinite_tails(w.m_grid);
    fam.members.push_back(naturals());
    fam.members.push_back(arithmetic_progression(0, 2));
    Ratio bound{2 * w.n_max + kCeilingSlack, w.n_max};
    for (const auto& src : sources) {
        RatioTable t(src, *comp, w);
        Ratio h = dim_H_hat(t), p = dim_p_hat(t);
        Ratio si = dim_si_hat(t, fam), is = dim_is_hat(t, fam);
        CHECK(h <= is);
        CHECK(is <= p);
        CHECK(h <= si);
        CHECK(si <= p);
        CHECK(p <= bound);
    }
}

TEST_CASE("alternating source splits the paired family functionals") {
    BitSource B = build_alternating(pseudorandom_source(7), squares_schedule());
    Window w = default_window(1ull << 16);
    RatioTable t(B, *make_compressor_estimator(), w);
    SegmentSchedule sq = squares_schedule();
    IndexFamily rfam = intersecting_tails(endpoint_set(sq, 2, 1, 0), w.n_min, w.n_max, "r-tails");
    IndexFamily zfam = intersecting_tails(endpoint_set(sq, 2, 0, 1), w.n_min, w.n_max, "z-tails");
    REQUIRE(rfam.members.size() == 2);
    REQUIRE(zfam.members.size() == 2);
    Ratio si = dim_si_hat(t, rfam);
    Ratio is = dim_is_hat(t, zfam);
    CHECK(si == (Ratio{552, 512}));
    CHECK(is == (Ratio{892, 65536}));
    CHECK(si.value() >= 0.8);
    CHECK(is.value() <= 0.1);

    std::vector<IndexSet> both = rfam.members;
    for (auto& m : zfam.members) both.push_back(m);
    DimensionProfile pr = profile(B, *make_compressor_estimator(), IndexFamily("r-and-z", both), w);
    CHECK(pr.dim_si == si);
    CHECK(pr.dim_is == is);
    CHECK(pr.members.size() == 4);
    CHECK(pr.members[pr.si_member].argmin == 512);
    CHECK(pr.members[pr.is_member].argmax == 65536);
}

TEST_CASE("packing stays high when a random segment closes inside every tail") {
    BitSource B = build_alternating(pseudorandom_source(11), compressed_schedule());
    Window w = default_window(1ull << 22);
    RatioTable t(B, *make_compressor_estimator(), w);
    Ratio p = dim_p_hat(t);
    CHECK(p == (Ratio{4173622, 4173846}));
    CHECK(p.value() >= 0.8);
}

TEST_CASE("family enlargement is monotone for sup-inf and antitone for inf-sup") {
    Window w = default_window(1ull << 13);
    RatioTable t(pseudorandom_source(7), *make_compressor_estimator(), w);
    std::mt19937_64 rng(20260822);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<IndexSet> small;
        small.push_back(arithmetic_progression(64 + rng() % 512, 1 + rng() % 64));
        small.push_back(geometric(64 + rng() % 64, 2 + rng() % 3));
        std::vector<IndexSet> big = small;
        big.push_back(arithmetic_progression(64 + rng() % 512, 1 + rng() % 64));
        IndexFamily fs("small", small), fb("big", big);
        CHECK(dim_si_hat(t, fs) <= dim_si_hat(t, fb));
        CHECK(dim_is_hat(t, fs) >= dim_is_hat(t, fb));
    }
}

TEST_CASE("thinning a member enumeration is idempotent and gap-bounded") {
    BitSource B = build_alternating(pseudorandom_source(7), squares_schedule());
    Window win = default_window(1ull << 13);
    RatioTable t(B, *make_compressor_estimator(), win);
    std::mt19937_64 rng(7);
    int exercised = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint64_t> stream;
        for (int i = 0; i < 40; ++i) stream.push_back(64 + rng() % ((1ull << 13) - 63));
        IndexSet member = thin_enumeration(stream, "m");
        if (member.enumerate(win.n_min, win.n_max).empty()) continue;
        IndexFamily base("base", {member, naturals()});
        Ratio si0 = dim_si_hat(t, base), is0 = dim_is_hat(t, base);

        IndexSet again = thin_enumeration(member.enumerate(1, ~0ull), "m2");
        IndexFamily rebuilt("rebuilt", {again, naturals()});
        CHECK(dim_si_hat(t, rebuilt) == si0);
        CHECK(dim_is_hat(t, rebuilt) == is0);

        std::vector<std::uint64_t> sub;
        for (auto e : member.enumerate(1, ~0ull))
            if (rng() % 2) sub.push_back(e);
        if (sub.empty()) continue;
        IndexSet thin = thin_enumeration(sub, "sub");
        if (thin.enumerate(win.n_min, win.n_max).empty()) continue;
        std::vector<IndexSet> added = base.members;
        added.push_back(thin);
        IndexFamily fadd("added", added);
        Ratio si1 = dim_si_hat(t, fadd), is1 = dim_is_hat(t, fadd);
        CHECK(si0 <= si1);
        CHECK(is1 <= is0);
        auto ws = member_witnesses(t, IndexFamily("solo", {member}));
        CHECK(diff_le(si1, si0, ws[0].max_ratio, ws[0].min_ratio));
        ++exercised;
    }
    CHECK(exercised >= 150);
}

TEST_CASE("a member with no element in the window is reported as exhausted") {
    Window w = default_window(1ull << 13);
    RatioTable t(pseudorandom_source(7), *make_compressor_estimator(), w);
    CHECK_THROWS_AS(dim_si_hat(t, IndexFamily("gone", {from_list({1ull << 20})})), exhausted_error);
    CHECK_THROWS_AS(member_witnesses(t, IndexFamily("gone", {from_list({1ull << 20})})), exhausted_error);
}

TEST_CASE("ratio table rejects out-of-window queries") {
    Window w = default_window(1ull << 10);
    RatioTable t(pseudorandom_source(7), *make_identity_estimator(), w);
    CHECK_THROWS_AS(t.at(0), invalid_range_error);
    CHECK_THROWS_AS(t.at(w.n_max + 1), invalid_range_error);
    CHECK(t.at(w.n_max) == (Ratio{1, 1}));
}
