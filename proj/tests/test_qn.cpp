#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "lineometer/qn.hpp"
#include "lineometer/synth.hpp"
#include "oracles.hpp"

using namespace lineometer;
using Catch::Approx;

namespace {

LengthSequence random_lengths(std::size_t K, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint32_t> v(K);
    for (auto& x : v) x = rng.uniform() < 0.15 ? 1 + static_cast<std::uint32_t>(rng.uniform() * 9) : rng.geometric(0.7);
    return LengthSequence(std::move(v));
}

QnProfile profile_of(std::vector<double> values) {
    QnProfile p;
    p.N = values.size();
    p.K = 1000;
    p.values = std::move(values);
    return p;
}

} // namespace

TEST_CASE("Q_n of degenerate sequences", "[qn]") {
    const auto ones = qn_profile(LengthSequence(std::vector<std::uint32_t>(10, 1)), 30);
    for (std::size_t n = 1; n <= 30; ++n) CHECK(ones(n) == 1.0);

    const auto twos = qn_profile(LengthSequence(std::vector<std::uint32_t>(10, 2)), 30);
    for (std::size_t n = 1; n <= 30; ++n) CHECK(twos(n) == (n % 2 == 0 ? 1.0 : 0.0));

    std::vector<std::uint32_t> alt;
    for (int i = 0; i < 50; ++i) alt.insert(alt.end(), {2, 1});
    const auto a = qn_profile(LengthSequence(alt), 30);
    for (std::size_t n = 1; n <= 30; ++n) CHECK(a(n) == (n % 3 == 0 ? 1.0 : 0.5));

    CHECK_THROWS_AS(qn_profile(LengthSequence({1, 2}), 0), Error);
    CHECK_THROWS_AS(qn_profile(LengthSequence{}, 5), Error);
}

TEST_CASE("Q_n equals the brute-force oracle", "[qn][oracle]") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t K = 1 + (seed * 37) % 512;
        const auto seq = random_lengths(K, seed);
        INFO("K = " << K << " seed " << seed);
        for (bool circular : {true, false}) {
            const auto boundary = circular ? Boundary::circular : Boundary::truncated;
            const auto expected = oracle::brute_force_qn_counts(seq.values(), 50, circular);
            CHECK(boundary_counts(seq, 50, boundary) == expected);
            const auto p = qn_profile(seq, 50, boundary);
            for (std::size_t n = 1; n <= 50; ++n) CHECK(p(n) == double(expected[n]) / double(K));
        }
    }
}

TEST_CASE("run counts partition the K runs of each length", "[qn][property]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto seq = random_lengths(20 + seed * 53, seed + 99);
        for (std::size_t k = 1; k <= 50; ++k) {
            std::uint64_t total = 0;
            for (auto [n, count] : run_sum_counts(seq, k)) total += count;
            CHECK(total == seq.size());
        }
    }
    // runs longer than the text wrap around it
    const auto wrap = run_sum_counts(LengthSequence({1, 2}), 5);
    REQUIRE(wrap.size() == 2);
    CHECK(wrap.at(7) == 1);  // 1+2+1+2+1
    CHECK(wrap.at(8) == 1);  // 2+1+2+1+2
}

TEST_CASE("Q_1 is the monosyllable fraction", "[qn][property]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto seq = random_lengths(100 + seed * 17, seed);
        CHECK(qn_profile(seq, 1)(1) == histogram(seq).at(1));
    }
}

TEST_CASE("Q_n stays within [0, 1]", "[qn][property]") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto seq = random_lengths(1 + seed * 11, seed + 7);
        for (auto b : {Boundary::circular, Boundary::truncated}) {
            for (double v : qn_profile(seq, 120, b).values) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("Q_n is flat at q under random segmentation", "[qn]") {
    const double q = 0.77;
    const std::size_t K = 100'000;
    const auto p = qn_profile(random_segmented(q, K, 77), 200);
    // Q_n = sum_t b_t b_{t+n} / sum_t b_t over Bernoulli(q) boundaries; the
    // delta-method variance of that ratio is q(1-q)/K
    const double se = std::sqrt(q * (1 - q) / double(K));
    double worst = 0.0;
    for (double v : p.values) worst = std::max(worst, std::abs(v - q));
    CHECK(worst < 5 * se);
}

TEST_CASE("isometric verse lifts Q_n at multiples of the line length", "[qn]") {
    // Boundaries are Bernoulli(q) inside a line and certain at its end. A run
    // starting at a line end hits another line end at n = 8j; other starts
    // hit one at a single residue of n mod 8. Per line there are 1 + 7q
    // boundaries, one of them the line end, so
    //   Q_{8j} = q + (1-q) / (1+7q),   Q_n = q + (1-q) q / (1+7q) otherwise.
    const double q = 0.7;
    const auto seq = isometric_lines(8, 20'000, q, 3);
    const auto p = qn_profile(seq, 200);
    const double on = q + (1 - q) / (1 + 7 * q);
    const double off = q + (1 - q) * q / (1 + 7 * q);
    const double se = std::sqrt(on * (1 - on) / double(seq.size()));
    for (std::size_t n = 9; n <= 200; ++n) {
        INFO("n = " << n);
        CHECK(std::abs(p(n) - (n % 8 == 0 ? on : off)) < 5 * se);
    }
    std::size_t argmax = 1;
    for (std::size_t n = 1; n <= 200; ++n) if (p(n) > p(argmax)) argmax = n;
    CHECK(argmax % 8 == 0);
}

TEST_CASE("window spread under both normalizations", "[qn]") {
    const auto p = profile_of({0.5, 0.7, 0.6, 0.6});
    const auto paper = qn_significance(p, {1, 4}, {SigmaConvention::paper, 0.01});
    CHECK(paper.mean == Approx(0.6));
    CHECK(paper.sigma_paper == Approx(std::sqrt(0.02) / 4));
    CHECK(paper.sigma_conventional == Approx(std::sqrt(0.02 / 4)));
    CHECK(paper.sigma == paper.sigma_paper);
    CHECK(paper.z[1] == Approx(0.1 / paper.sigma_paper));
    const auto conv = qn_significance(p, {1, 4});
    CHECK(conv.sigma == conv.sigma_conventional);
    CHECK(conv.z[1] == Approx(std::sqrt(2.0)));
}

TEST_CASE("published Q_4 significance", "[qn]") {
    const double z = qn_zscore(0.7218, 0.6914, 0.007219);
    CHECK(z == Approx(4.2).margin(0.1));
    CHECK(normal_tail(z) == Approx(1.3e-5).epsilon(0.05));
}

TEST_CASE("flat profile is degenerate but not an error", "[qn]") {
    const auto sig = qn_significance(profile_of(std::vector<double>(10, 0.7)), {1, 10});
    CHECK(sig.degenerate_flat);
    CHECK(sig.sigma < 1e-12);
    CHECK(sig.flagged.empty());
}

TEST_CASE("bad windows are rejected", "[qn]") {
    const auto p = profile_of(std::vector<double>(10, 0.7));
    auto kind_of = [&](QnWindow w) {
        try {
            qn_significance(p, w);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::io;
    };
    CHECK(kind_of({0, 5}) == ErrorKind::degenerate_window);
    CHECK(kind_of({3, 3}) == ErrorKind::degenerate_window);
    CHECK(kind_of({5, 11}) == ErrorKind::degenerate_window);
    CHECK(kind_of({6, 2}) == ErrorKind::degenerate_window);
}

TEST_CASE("single injected peak is flagged with multiple-comparison control", "[qn]") {
    std::vector<double> v(200);
    Rng rng(5);
    for (auto& x : v) x = 0.69 + 0.007 * rng.normal();
    v[3] = 0.69 + 0.007 * 6.0;
    const auto p = profile_of(v);
    const auto sig = qn_significance(p);
    REQUIRE(sig.flagged.size() == 1);
    CHECK(sig.flagged[0].n == 4);
    CHECK(sig.flagged[0].p * 200 < 0.01);
    const auto families = peak_scan(p, sig);
    REQUIRE(families.size() == 1);
    CHECK(families[0].fundamental == 4);
    CHECK(families[0].isolated);
}

TEST_CASE("harmonic grouping", "[qn]") {
    auto f = group_harmonics({4, 8, 12});
    REQUIRE(f.size() == 1);
    CHECK(f[0].fundamental == 4);
    CHECK(f[0].fundamental_flagged);
    CHECK(f[0].members == std::vector<std::size_t>{4, 8, 12});
    CHECK(f[0].missing.empty());
    CHECK_FALSE(f[0].isolated);

    f = group_harmonics({4});
    REQUIRE(f.size() == 1);
    CHECK(f[0].fundamental == 4);
    CHECK(f[0].isolated);

    f = group_harmonics({4, 6, 8, 10});
    REQUIRE(f.size() == 1);
    CHECK(f[0].fundamental == 2);
    CHECK_FALSE(f[0].fundamental_flagged);
    CHECK(f[0].missing == std::vector<std::size_t>{2});

    f = group_harmonics({9, 4});
    REQUIRE(f.size() == 2);
    CHECK(f[0].fundamental == 4);
    CHECK(f[1].fundamental == 9);

    CHECK(group_harmonics({}).empty());
}

TEST_CASE("peak_scan checks its inputs belong together", "[qn]") {
    const auto a = qn_profile(random_lengths(300, 1), 40);
    const auto b = qn_profile(random_lengths(301, 2), 40);
    const auto sig = qn_significance(a, {1, 40});
    CHECK_THROWS_AS(peak_scan(b, sig), Error);
}

TEST_CASE("Q_2 dip against a geometric baseline", "[qn]") {
    const auto seq = random_segmented(0.75, 20'000, 3);
    const auto model = fit_model(seq);
    const auto profile = qn_profile(seq, 10);

    SECTION("text as its own baseline") {
        QnBaseline self{model.q, seq.size(), {profile(2)}};
        const auto d = q2_dip_report(profile, model, self);
        CHECK(d.deviation == 0.0);
        CHECK(d.standard_error > 0.0);
    }
    SECTION("mismatched q is rejected") {
        const auto other = geometric_baseline(SegmentationModel::from_q(0.6), seq.size(), 2, 1);
        try {
            q2_dip_report(profile, model, other);
            FAIL("expected mismatch");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::model_mismatch);
        }
    }
}

TEST_CASE("disyllable enrichment raises Q_2 above the baseline", "[qn]") {
    // 15% of words forced to two syllables on top of geometric(0.8)
    Rng rng(8);
    std::vector<std::uint32_t> v(50'000);
    for (auto& x : v) x = rng.uniform() < 0.15 ? 2 : rng.geometric(0.8);
    const LengthSequence seq(std::move(v));
    const auto model = fit_model(seq);
    const auto d = q2_dip_report(qn_profile(seq, 2), model, geometric_baseline(model, seq.size(), 10, 100));
    CHECK(d.deviation > 4 * d.standard_error);
}

TEST_CASE("Q_2 deviation calibration on geometric corpora", "[qn][property]") {
    std::size_t within = 0;
    const std::size_t pairs = 40;
    for (std::uint64_t seed = 0; seed < pairs; ++seed) {
        const auto seq = random_segmented(0.77, 20'000, 1000 + seed);
        const auto model = fit_model(seq);
        const auto d = q2_dip_report(qn_profile(seq, 2), model, geometric_baseline(model, seq.size(), 8, 5000 + 100 * seed));
        within += std::abs(d.deviation) < 4 * d.standard_error;
    }
    CHECK(within >= 38);
}

TEST_CASE("Q_n CSV export", "[qn]") {
    const auto p = qn_profile(LengthSequence({2, 1, 2, 1}), 3);
    std::ostringstream os;
    write_qn_csv(os, p);
    CHECK(os.str() == "n,Q_n,z,p\n1,0.5,,\n2,0.5,,\n3,1,,\n");
}
