#include <doctest.h>

#include <cmath>
#include <random>

#include "isac/detect.hpp"

using namespace isac;

namespace {

// Solves (1 + a/N)^-N = pfa for a by bisection.
double scale_by_bisection(int n, double pfa) {
    double lo = 0.0, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::pow(1.0 + mid / n, -n) > pfa) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

RGrid exponential_image(int n, int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> ex(1.0);
    RGrid img(n, m);
    for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = ex(rng);
    return img;
}

WaveformConfig grid(int n, int m) {
    WaveformConfig wf;
    wf.n_subc = n;
    wf.n_sym = m;
    return wf;
}

}  // namespace

TEST_CASE("CFAR scale factor") {
    CfarConfig cfg;
    CHECK(training_cell_count(cfg) == 60);
    CHECK(cfar_scale(60, 1e-4) == doctest::Approx(9.9549).epsilon(1e-4));
    for (int n : {4, 16, 60, 200})
        for (double pfa : {1e-2, 1e-4, 1e-6}) CHECK(cfar_scale(n, pfa) == doctest::Approx(scale_by_bisection(n, pfa)).epsilon(1e-10));

    CfarConfig wide;
    wide.guard = {2, 2};
    wide.training = {8, 4};
    CHECK(training_cell_count(wide) == 17 * 9 - 25);
}

TEST_CASE("CFAR threshold equals alpha times the ring mean") {
    const RGrid img = exponential_image(20, 24, 3);
    CfarConfig cfg;
    cfg.guard = {1, 1};
    cfg.training = {2, 3};
    const RGrid thr = cfar_threshold(img, cfg);
    const int nt = training_cell_count(cfg);
    const double a = cfar_scale(nt, cfg.pfa);
    for (int p : {0, 7, 19}) {
        for (int q : {0, 11, 23}) {
            double s = 0.0;
            for (int dp = -2; dp <= 2; ++dp)
                for (int dq = -3; dq <= 3; ++dq)
                    if (std::abs(dp) > 1 || std::abs(dq) > 1) s += img((p + dp + 20) % 20, (q + dq + 24) % 24);
            CHECK(thr(p, q) == doctest::Approx(a * s / nt).epsilon(1e-12));
        }
    }
}

TEST_CASE("CFAR basic behaviour") {
    CfarConfig cfg;
    CHECK(cfar_2d(RGrid::Zero(40, 30), cfg).empty());

    RGrid img = RGrid::Constant(40, 30, 1.0);
    img(10, 3) = 1e4;
    const DetectionList d = cfar_2d(img, cfg);
    REQUIRE(d.size() == 1);
    CHECK(d.peaks[0].delay_bin == 10);
    CHECK(d.peaks[0].doppler_bin == 3);
    CHECK(d.peaks[0].value == 1e4);
    CHECK(d.peaks[0].threshold == doctest::Approx(cfar_scale(60, 1e-4)));

    CfarConfig big;
    big.training = {30, 8};
    CHECK_THROWS_AS(cfar_2d(img, big), ConfigError);
}

TEST_CASE("adjacent exceedances collapse to one local maximum") {
    RGrid img = RGrid::Constant(40, 30, 1.0);
    img(10, 3) = 1e4;
    img(11, 3) = 5e3;
    img(10, 4) = 2e3;
    const DetectionList d = cfar_2d(img, CfarConfig{});
    REQUIRE(d.size() == 1);
    CHECK(d.peaks[0].delay_bin == 10);
}

TEST_CASE("peaks are sorted by descending value") {
    RGrid img = RGrid::Constant(60, 40, 1.0);
    img(5, 5) = 300.0;
    img(30, 20) = 900.0;
    img(50, 35) = 600.0;
    const DetectionList d = cfar_2d(img, CfarConfig{});
    REQUIRE(d.size() == 3);
    CHECK(d.peaks[0].value == 900.0);
    CHECK(d.peaks[1].value == 600.0);
    CHECK(d.peaks[2].value == 300.0);
}

TEST_CASE("floor_rel suppresses round-off cells") {
    RGrid img = RGrid::Zero(40, 30);
    img(10, 0) = 1.0;
    img(20, 15) = 1e-14;
    CHECK(cfar_2d(img, CfarConfig{}).size() == 1);
    CfarConfig raw;
    raw.floor_rel = 0.0;
    CHECK(cfar_2d(img, raw).size() == 2);
}

TEST_CASE("CFAR false-alarm rate on exponential noise") {
    // 1.2e6 cells keeps the unit test quick; the acceptance run uses 1e7.
    std::size_t alarms = 0, cells = 0;
    CfarConfig cfg;
    cfg.pfa = 1e-3;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const RGrid img = exponential_image(400, 60, s + 100);
        const RGrid thr = cfar_threshold(img, cfg);
        alarms += static_cast<std::size_t>((img.array() > thr.array()).count());
        cells += static_cast<std::size_t>(img.size());
    }
    const double rate = static_cast<double>(alarms) / static_cast<double>(cells);
    CHECK(rate > 0.5e-3);
    CHECK(rate < 2e-3);
}

TEST_CASE("non-wrapping CFAR uses the cells that exist") {
    const RGrid img = exponential_image(20, 20, 9);
    CfarConfig cfg;
    cfg.wrap = false;
    cfg.guard = {1, 1};
    cfg.training = {2, 2};
    const RGrid thr = cfar_threshold(img, cfg);
    double s = 0.0;
    int n = 0;
    for (int dp = 0; dp <= 2; ++dp)
        for (int dq = 0; dq <= 2; ++dq)
            if (dp > 1 || dq > 1) {
                s += img(dp, dq);
                ++n;
            }
    CHECK(n == 5);
    CHECK(thr(0, 0) == doctest::Approx(cfar_scale(n, cfg.pfa) * s / n).epsilon(1e-12));
}

TEST_CASE("true bins and signed Doppler") {
    const WaveformConfig wf = grid(400, 60);
    const Path p{{1.0, 0.0}, 11.4 * wf.delay_resolution(), -2.2 * wf.doppler_resolution(), 0.0};
    const Bin b = true_bin(p, wf);
    CHECK(b.delay == 11);
    CHECK(b.doppler == 58);
    CHECK(signed_doppler_bin(58, 60) == -2);
    CHECK(signed_doppler_bin(30, 60) == -30);
    CHECK(signed_doppler_bin(29, 60) == 29);
}

TEST_CASE("association gate") {
    const WaveformConfig wf = grid(100, 20);
    PathSet truth;
    truth.paths = {{{1.0, 0.0}, 10 * wf.delay_resolution(), 0.0, 0.0}};
    SUBCASE("exact hit") {
        CHECK(associate({{{10, 0, 5.0, 1.0}}}, truth, 1, wf)[0]);
    }
    SUBCASE("wrapped Doppler within the gate") {
        CHECK(associate({{{11, 19, 5.0, 1.0}}}, truth, 1, wf)[0]);
    }
    SUBCASE("three bins away misses") {
        CHECK_FALSE(associate({{{13, 0, 5.0, 1.0}}}, truth, 1, wf)[0]);
    }
}

TEST_CASE("one peak between two targets goes to the stronger path") {
    const WaveformConfig wf = grid(100, 20);
    PathSet truth;
    truth.paths = {{{0.1, 0.0}, 10 * wf.delay_resolution(), 0.0, 0.0},
                   {{0.9, 0.0}, 12 * wf.delay_resolution(), 0.0, 0.0}};
    const auto hits = associate({{{11, 0, 5.0, 1.0}}}, truth, 1, wf);
    CHECK_FALSE(hits[0]);
    CHECK(hits[1]);
}
