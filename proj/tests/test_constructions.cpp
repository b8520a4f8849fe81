#include <bitdim/complexity.hpp>
#include <bitdim/constructions.hpp>
#include <bitdim/core.hpp>
#include <bitdim/families.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace bitdim;

TEST_CASE("boundary recurrence reproduces the identity-rate table") {
    EllLambda el = ell_lambda(identity_rate(), 6);
    std::vector<BigInt> ell = {1, 16, 512, 65536, BigInt(1) << 25, BigInt(1) << 36, BigInt(1) << 49};
    std::vector<BigInt> lambda = {1, 2, 18, 530, 66066, 33620498, BigInt(33620498) + (BigInt(1) << 36)};
    CHECK(el.ell == ell);
    CHECK(el.lambda == lambda);
}

TEST_CASE("boundary recurrence ordering facts hold exactly") {
    for (auto rate : {identity_rate(), square_rate()}) {
        EllLambda el = ell_lambda(rate, 5);
        for (std::size_t k = 1; k < el.ell.size(); ++k) {
            BigInt g = el.lambda[k];
            BigInt fv = rate.apply(el.lambda[k]);
            if (fv > g) g = fv;
            CHECK(el.ell[k] > g);
            CHECK(g >= el.lambda[k]);
            CHECK(el.lambda[k] >= el.ell[k - 1]);
        }
        for (std::size_t k = 2; k < el.ell.size(); ++k)
            CHECK(el.ell[k - 2] * el.ell[k] > el.ell[k - 1] * el.ell[k - 1]);
    }
}

TEST_CASE("square rate jumps the recurrence to huge blocks") {
    EllLambda el = ell_lambda(square_rate(), 5);
    CHECK(el.ell[2] == 512);
    CHECK(el.ell[3] == (BigInt(1) << 25));
    CHECK(el.lambda[4] == BigInt(530) + (BigInt(1) << 25));
    CHECK(el.ell[4] == (BigInt(1) << 64));
    CHECK(el.lambda[5] == BigInt(33554962) + (BigInt(1) << 64));
}

TEST_CASE("non-monotone rates route through the exhaustive max") {
    RateFunction dip{"dip", [](const BigInt& n) { return n == 3 ? BigInt(100) : n; }, false};
    EllLambda el = ell_lambda(dip, 3);
    CHECK(el.ell == (std::vector<BigInt>{1, 16, 512, 65536}));
    RateFunction wild{"wild", [](const BigInt& n) { return n; }, false};
    CHECK_THROWS_AS(ell_lambda(wild, 30), horizon_too_deep_error);
}

TEST_CASE("square schedule boundaries and validation") {
    SegmentSchedule sq = squares_schedule();
    CHECK_NOTHROW(sq.validate(8));
    CHECK(sq.boundary(0) == 1);
    CHECK(sq.boundary(3) == 512);
    CHECK(sq.boundary(4) == 65536);
    CHECK(sq.boundary_u64(7) == (1ull << 49));
    CHECK(!sq.boundary_u64(8).has_value());
}

TEST_CASE("compressed schedule starts denser but validates the same way") {
    SegmentSchedule cp = compressed_schedule();
    CHECK_NOTHROW(cp.validate(8));
    CHECK(cp.boundary(1) == 4);
    CHECK(cp.boundary(3) == 256);
    CHECK(cp.boundary(4) == 16384);
    CHECK(cp.boundary(6) == (BigInt(1) << 32));
}

TEST_CASE("explicit schedules validate to the end of their table") {
    SegmentSchedule ex = explicit_schedule({1, 2, 16, 512});
    CHECK_NOTHROW(ex.validate(100));
    CHECK(ex.boundary(2) == 16);
    CHECK_THROWS_AS(ex.boundary(4), horizon_too_deep_error);
    SegmentSchedule bad = explicit_schedule({1, 2, 4, 8});
    CHECK_THROWS_AS(bad.validate(3), error);
}

TEST_CASE("segment slot lookup respects the filter") {
    SegmentSchedule sq = squares_schedule();
    CHECK(k_of_n(sq, 100) == 2);
    CHECK(k_of_n(sq, 100, SegmentFilter::odd) == 1);
    CHECK(k_of_n(sq, 1) == 0);
    CHECK(k_of_n(sq, 511) == 2);
    CHECK(k_of_n(sq, 512) == 3);
    CHECK(k_of_n(sq, 2, SegmentFilter::odd) == 1);
    CHECK(k_of_n(sq, 600, SegmentFilter::mod3eq2) == 2);
    CHECK_THROWS_AS(k_of_n(sq, 1, SegmentFilter::odd), below_first_boundary_error);
    CHECK_THROWS_AS(k_of_n(sq, 0), below_first_boundary_error);
}

TEST_CASE("boundary endpoint sets enumerate the 64-bit reachable values") {
    SegmentSchedule sq = squares_schedule();
    auto odd = endpoint_set(sq, 2, 1, 0).enumerate(1, ~0ull);
    CHECK(odd == (std::vector<std::uint64_t>{2, 512, 1ull << 25, 1ull << 49}));
    auto even1 = endpoint_set(sq, 2, 0, 1).enumerate(1, ~0ull);
    CHECK(even1 == (std::vector<std::uint64_t>{16, 65536, 1ull << 36}));
    CHECK_THROWS_AS(endpoint_set(sq, 2, 0, 9), exhausted_error);
    SegmentSchedule ex = explicit_schedule({1, 2, 16, 512});
    CHECK(endpoint_set(ex, 1, 0, 0).enumerate(1, ~0ull) == (std::vector<std::uint64_t>{1, 2, 16, 512}));
}

TEST_CASE("alternating build copies the source on even slots and zeroes odd ones") {
    BitSource R = pseudorandom_source(7);
    BitSource A = build_alternating(R, squares_schedule());
    for (std::uint64_t n = 0; n < (1ull << 13); ++n) {
        int want;
        if (n < 1) want = 0;
        else if (n < 2) want = R.bit(n - 1);
        else if (n < 16) want = 0;
        else if (n < 512) want = R.bit(n - 16);
        else want = 0;
        REQUIRE(A.bit(n) == want);
    }
    CHECK(A.bit(65536) == R.bit(0));
    CHECK(A.bit(65536 + 37) == R.bit(37));
}

TEST_CASE("alternating build has the expected compressibility swing") {
    BitSource A = build_alternating(pseudorandom_source(7), squares_schedule());
    auto comp = make_compressor_estimator();
    CHECK(comp->estimate(prefix(A, 512)) == 552);
    CHECK(comp->estimate(prefix(A, 65536)) == 892);
}

TEST_CASE("double-segment build carries the doubled guide on odd slots") {
    BitSource R = pseudorandom_source(7);
    GuideSet evens = residue_guide(2, 0);
    SegmentSchedule sq = squares_schedule();
    BitSource D0 = build_double_segment(R, evens, sq, DoubleSegmentMode::si_zero);
    BitSource D1 = build_double_segment(R, evens, sq, DoubleSegmentMode::is_random);
    for (std::uint64_t n = 0; n < (1ull << 13); ++n) {
        int want0 = (n >= 2 && n < 512) ? R.bit(n - 2) : 0;
        int want1 = (n >= 512) ? R.bit(n - 512) : 0;
        REQUIRE(D0.bit(n) == want0);
        REQUIRE(D1.bit(n) == want1);
    }
    CHECK(D0.bit(1ull << 25) == R.bit(0));
    CHECK(D1.bit(1ull << 25) == 0);
}

TEST_CASE("triple-guided build follows the tripled guide over carrier slots") {
    BitSource R = pseudorandom_source(7);
    EllLambda el = ell_lambda(identity_rate(), 6);
    BitSource T = build_triple_guided(R, full_guide(), el);
    for (std::uint64_t n = 0; n < (1ull << 13); ++n) {
        int want = (n >= 512) ? R.bit(n - 512) : 0;
        REQUIRE(T.bit(n) == want);
    }
    CHECK(T.bit(65536) == R.bit(65536 - 512));
    CHECK(T.bit(1ull << 36) == R.bit(0));
    BitSource T1 = build_triple_guided(R, residue_guide(2, 1), el);
    CHECK(T1.bit(512) == 0);
    CHECK(T1.bit(600) == 0);
    CHECK(T1.bit(1ull << 36) == R.bit(0));
}

TEST_CASE("guide boundary sets list the reachable block edges") {
    EllLambda el = ell_lambda(identity_rate(), 6);
    auto all = ell_endpoint_set(el, full_guide(), 0).enumerate(1, ~0ull);
    CHECK(all == (std::vector<std::uint64_t>{1, 16, 512, 65536, 1ull << 25, 1ull << 36, 1ull << 49}));
    auto dropped = ell_endpoint_set(el, full_guide(), 3).enumerate(1, ~0ull);
    CHECK(dropped == (std::vector<std::uint64_t>{65536, 1ull << 25, 1ull << 36, 1ull << 49}));
    auto evens = ell_endpoint_set(el, residue_guide(2, 0), 0).enumerate(1, ~0ull);
    CHECK(evens == (std::vector<std::uint64_t>{1, 16, 512, 1ull << 49}));
    auto right = carrier_right_endpoint_set(el, full_guide(), 0).enumerate(1, ~0ull);
    CHECK(right == (std::vector<std::uint64_t>{1ull << 36}));
    CHECK_THROWS_AS(ell_endpoint_set(el, full_guide(), 7), exhausted_error);
}

TEST_CASE("generic build serves a two-requirement bank round robin") {
    BitSource R = pseudorandom_source(7);
    std::vector<Requirement> bank;
    bank.push_back({"inc8", geometric(8, 4), Polarity::incompressible});
    bank.push_back({"comp16", geometric(16, 4), Polarity::compressible});
    GenericBuild g = build_generic_like(bank, 1ull << 13, R);
    REQUIRE(g.log.size() == 11);
    CHECK(g.log.front().met_at_length == 8);
    CHECK(g.log.back().met_at_length == 8192);
    for (std::size_t i = 0; i + 1 < g.log.size(); ++i) {
        CHECK(g.log[i].met_at_length * 2 == g.log[i + 1].met_at_length);
        CHECK(g.log[i].requirement != g.log[i + 1].requirement);
    }
    CHECK(g.source.bit(0) == R.bit(0));
    CHECK(g.source.bit(9) == 0);
    CHECK(g.source.bit(20) == R.bit(20));
    CHECK(g.source.bit(8191) == R.bit(8191));
}

TEST_CASE("generic build with spot requirements hits the frozen estimates") {
    BitSource R = pseudorandom_source(7);
    std::vector<Requirement> bank;
    bank.push_back({"i64", from_list({64}), Polarity::incompressible});
    bank.push_back({"c1024", from_list({1024}), Polarity::compressible});
    bank.push_back({"i16384", from_list({16384}), Polarity::incompressible});
    bank.push_back({"c262144", from_list({262144}), Polarity::compressible});
    GenericBuild g = build_generic_like(bank, 1ull << 18, R, "generic-bank");
    REQUIRE(g.log.size() == 4);
    auto comp = make_compressor_estimator();
    CHECK(comp->estimate(prefix(g.source, 64)) == 91);
    CHECK(comp->estimate(prefix(g.source, 1024)) == 134);
    CHECK(comp->estimate(prefix(g.source, 16384)) == 16222);
    CHECK(comp->estimate(prefix(g.source, 262144)) == 22639);
}

TEST_CASE("impossible banks are rejected") {
    BitSource R = pseudorandom_source(7);
    std::vector<Requirement> same;
    same.push_back({"a", geometric(8, 4), Polarity::incompressible});
    same.push_back({"b", geometric(8, 4), Polarity::compressible});
    CHECK_THROWS_AS(build_generic_like(same, 1ull << 13, R), unsatisfiable_bank_error);

    std::vector<Requirement> lastslot;
    lastslot.push_back({"a", from_list({100}), Polarity::incompressible});
    lastslot.push_back({"b", from_list({50, 100}), Polarity::compressible});
    CHECK_THROWS_AS(build_generic_like(lastslot, 1ull << 13, R), unsatisfiable_bank_error);

    std::vector<Requirement> unreachable;
    unreachable.push_back({"a", from_list({1ull << 20}), Polarity::incompressible});
    CHECK_THROWS_AS(build_generic_like(unreachable, 1ull << 13, R), unsatisfiable_bank_error);
}

TEST_CASE("shared lengths are fine while the constrained side has slots left") {
    BitSource R = pseudorandom_source(7);
    std::vector<Requirement> bank;
    bank.push_back({"a", from_list({100}), Polarity::incompressible});
    bank.push_back({"b", from_list({100, 400}), Polarity::compressible});
    GenericBuild g = build_generic_like(bank, 1ull << 13, R);
    REQUIRE(g.log.size() == 2);
    CHECK(g.log[0].met_at_length == 100);
    CHECK(g.log[1].met_at_length == 400);
}

TEST_CASE("adjacent zero-segment scan finds a doubled-guide gap") {
    SegmentSchedule ex = explicit_schedule({1, 2, 8, 32, 128, 512, 2048, 8192});
    GuideSet thirds = residue_guide(3, 0);
    IndexFamily fam("probe", {naturals(), geometric(64, 4)});
    auto reports = adjacent_zero_scan(thirds, ex, fam, 8192);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].status == ScanStatus::found);
    CHECK(reports[0].witness == 512);
    CHECK(reports[0].elements_checked == 481);
    CHECK(reports[1].status == ScanStatus::found);
    CHECK(reports[1].witness == 1024);
    CHECK(reports[1].elements_checked == 3);
}

TEST_CASE("adjacent zero-segment scan exhausts when the guide never pairs") {
    SegmentSchedule ex = explicit_schedule({1, 2, 8, 32, 128, 512, 2048, 8192});
    auto reports = adjacent_zero_scan(residue_guide(2, 0), ex, IndexFamily("probe", {naturals()}), 8192);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].status == ScanStatus::exhausted_at_horizon);
    CHECK(reports[0].witness == 0);
    CHECK(reports[0].elements_checked == 8161);
}

TEST_CASE("adjacent zero-segment scan exhausts on the square schedule at desk horizon") {
    GuideSet codes = prefix_code_guide(pseudorandom_source(7));
    auto reports =
        adjacent_zero_scan(codes, squares_schedule(), IndexFamily("probe", {naturals()}), 1ull << 13);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].status == ScanStatus::exhausted_at_horizon);
    auto empty =
        adjacent_zero_scan(empty_guide(), squares_schedule(), IndexFamily("probe", {naturals()}), 1ull << 13);
    CHECK(empty[0].status == ScanStatus::found);
    CHECK(empty[0].witness == 512);
    CHECK(empty[0].elements_checked == 1);
}
