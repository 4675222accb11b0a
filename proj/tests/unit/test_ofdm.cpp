#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "isac/ofdm.hpp"

using namespace isac;

namespace {

const Modulation kAll[] = {Modulation::qpsk, Modulation::qam16, Modulation::qam64, Modulation::qam256,
                           Modulation::qam1024};

}  // namespace

TEST_CASE("constellations have unit energy and distinct points") {
    for (Modulation m : kAll) {
        const Constellation c(m);
        CHECK(c.size() == (std::size_t{1} << c.bits_per_symbol()));
        double e = 0.0;
        for (auto p : c.points()) e += std::norm(p);
        CHECK(e / static_cast<double>(c.size()) == doctest::Approx(1.0).epsilon(1e-12));
        std::set<std::pair<double, double>> uniq;
        for (auto p : c.points()) uniq.insert({p.real(), p.imag()});
        CHECK(uniq.size() == c.size());
    }
}

TEST_CASE("Gray labelling: nearest neighbours differ in one bit") {
    for (Modulation m : kAll) {
        const Constellation c(m);
        const auto& pts = c.points();
        double dmin = 1e9;
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b) dmin = std::min(dmin, std::abs(pts[a] - pts[b]));
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b)
                if (std::abs(pts[a] - pts[b]) < dmin * 1.0001)
                    CHECK(__builtin_popcount(static_cast<unsigned>(a ^ b)) == 1);
    }
}

TEST_CASE("QPSK corner for bits 00") {
    const Constellation c(Modulation::qpsk);
    const cdouble expect = cdouble(1.0, 1.0) / std::sqrt(2.0);
    CHECK(std::abs(c.map(0) - expect) < 1e-15);
}

TEST_CASE("demap_hard examples") {
    const Constellation q(Modulation::qpsk);
    const auto d = demap_hard({{0.9, 0.1}}, q);
    CHECK(std::abs(d.symbols[0] - cdouble(1.0, 1.0) / std::sqrt(2.0)) < 1e-15);
    CHECK(d.bits == std::vector<std::uint8_t>{0, 0});

    for (Modulation m : kAll) {
        const Constellation c(m);
        const auto r = demap_hard(c.points(), c);
        CHECK(r.symbols == c.points());
    }
}

TEST_CASE("ties resolve to the smaller label") {
    for (Modulation m : kAll) {
        const Constellation c(m);
        const auto& pts = c.points();
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                const cdouble mid = 0.5 * (pts[a] + pts[b]);
                const unsigned got = c.slice(mid);
                // Only exact two-way ties between axis neighbours are unambiguous.
                if (std::abs(std::abs(mid - pts[a]) - std::abs(mid - pts[b])) > 0) continue;
                double best = 1e9;
                for (auto p : pts) best = std::min(best, std::abs(mid - p));
                if (std::abs(std::abs(mid - pts[a]) - best) > 1e-12) continue;
                std::size_t n_best = 0;
                for (auto p : pts) n_best += std::abs(std::abs(mid - p) - best) < 1e-12;
                if (n_best != 2) continue;
                CHECK(got == a);
            }
        }
    }
}

TEST_CASE("modulation names") {
    CHECK(parse_modulation("QPSK") == Modulation::qpsk);
    CHECK(parse_modulation("1024-QAM") == Modulation::qam1024);
    CHECK(parse_modulation("16qam") == Modulation::qam16);
    CHECK(to_string(Modulation::qam256) == "256QAM");
    CHECK_THROWS_AS(parse_modulation("8PSK"), ConfigError);
}

TEST_CASE("pilot pattern sizes") {
    CHECK(generate_pilot_pattern(400, 60, 5.0, 1).size() == 1200);
    const PilotPattern full = generate_pilot_pattern(20, 10, 100.0, 3);
    CHECK(full.size() == 200);
    CHECK(full.data_cells() == 0);
    CHECK(generate_pilot_pattern(20, 10, 0.0, 3).size() == 0);
    // 2.5 cells rounds half away from zero.
    CHECK(pilot_count(5, 10, 5.0) == 3);
    CHECK(pilot_count(7, 3, 10.0) == 2);
}

TEST_CASE("pilot pattern is reproducible, unique and in-grid") {
    const PilotPattern a = generate_pilot_pattern(64, 12, 17.0, 42);
    const PilotPattern b = generate_pilot_pattern(64, 12, 17.0, 42);
    const PilotPattern c = generate_pilot_pattern(64, 12, 17.0, 43);
    CHECK(a.indices == b.indices);
    CHECK(a.indices != c.indices);
    std::set<std::pair<int, int>> uniq;
    for (auto g : a.indices) {
        CHECK(g.subcarrier >= 0);
        CHECK(g.subcarrier < 64);
        CHECK(g.symbol >= 0);
        CHECK(g.symbol < 12);
        CHECK(a.is_pilot(g.subcarrier, g.symbol));
        uniq.insert({g.subcarrier, g.symbol});
    }
    CHECK(uniq.size() == a.size());
    CHECK(std::is_sorted(a.indices.begin(), a.indices.end()));
}

TEST_CASE("make_pilot_pattern rejects bad indices") {
    CHECK_THROWS_AS(make_pilot_pattern(4, 4, {{1, 1}, {1, 1}}), ConfigError);
    CHECK_THROWS_AS(make_pilot_pattern(4, 4, {{4, 0}}), ConfigError);
}

TEST_CASE("tx frame structure") {
    auto pilots = std::make_shared<const PilotPattern>(generate_pilot_pattern(40, 12, 10.0, 5));
    auto cst = std::make_shared<const Constellation>(Modulation::qam16);
    const TxFrame f = build_tx_frame(pilots, cst, 9, 5);
    CHECK(f.payload_bits.size() == pilots->data_cells() * 4);
    for (int m = 0; m < 12; ++m) {
        for (int n = 0; n < 40; ++n) {
            const cdouble v = f.x(n, m);
            if (pilots->is_pilot(n, m)) {
                CHECK(std::abs(std::abs(v) - 1.0) < 1e-15);
            } else {
                CHECK(std::abs(v - cst->map(cst->slice(v))) < 1e-15);
            }
        }
    }
    CHECK_THROWS_AS(build_tx_frame(pilots, cst, std::vector<std::uint8_t>(3, 0), 5), std::invalid_argument);
}

TEST_CASE("all-pilot frame has unit modulus everywhere") {
    auto pilots = std::make_shared<const PilotPattern>(generate_pilot_pattern(16, 8, 100.0, 1));
    auto cst = std::make_shared<const Constellation>(Modulation::qpsk);
    const TxFrame f = build_tx_frame(pilots, cst, 1, 1);
    CHECK((f.x.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("1024-QAM frame energy") {
    auto pilots = std::make_shared<const PilotPattern>(generate_pilot_pattern(400, 60, 5.0, 1));
    auto cst = std::make_shared<const Constellation>(Modulation::qam1024);
    const TxFrame f = build_tx_frame(pilots, cst, 7, 1);
    double e = 0.0;
    for (std::size_t i = 0; i < pilots->cells(); ++i)
        if (!pilots->is_pilot(i)) e += std::norm(f.x.data()[i]);
    e /= static_cast<double>(pilots->data_cells());
    CHECK(e >= 0.97);
    CHECK(e <= 1.03);
}

TEST_CASE("bits round trip through the frame") {
    auto pilots = std::make_shared<const PilotPattern>(generate_pilot_pattern(32, 6, 20.0, 2));
    for (Modulation m : kAll) {
        auto cst = std::make_shared<const Constellation>(m);
        const TxFrame f = build_tx_frame(pilots, cst, 11, 2);
        std::vector<cdouble> data;
        for (std::size_t i = 0; i < pilots->cells(); ++i)
            if (!pilots->is_pilot(i)) data.push_back(f.x.data()[i]);
        CHECK(demap_hard(data, *cst).bits == f.payload_bits);
    }
}

TEST_CASE("pilot CSV round trip") {
    std::filesystem::create_directories(ISAC_TEST_TMPDIR);
    const std::string path = std::string(ISAC_TEST_TMPDIR) + "/pilots.csv";
    const PilotPattern a = generate_pilot_pattern(30, 7, 12.0, 8);
    write_pilot_csv(path, a);
    const PilotPattern b = read_pilot_csv(path, 30, 7);
    CHECK(a.indices == b.indices);
    CHECK(a.mask == b.mask);
}
