#include "isac/ofdm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "isac/rng.hpp"

namespace isac {

Modulation parse_modulation(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
    if (s == "QPSK" || s == "4QAM") return Modulation::qpsk;
    if (s == "16QAM") return Modulation::qam16;
    if (s == "64QAM") return Modulation::qam64;
    if (s == "256QAM") return Modulation::qam256;
    if (s == "1024QAM") return Modulation::qam1024;
    throw ConfigError("unknown modulation '" + std::string(name) + "'");
}

std::string to_string(Modulation m) {
    switch (m) {
        case Modulation::qpsk: return "QPSK";
        case Modulation::qam16: return "16QAM";
        case Modulation::qam64: return "64QAM";
        case Modulation::qam256: return "256QAM";
        case Modulation::qam1024: return "1024QAM";
    }
    return "?";
}

namespace {

int bits_for(Modulation m) {
    switch (m) {
        case Modulation::qpsk: return 2;
        case Modulation::qam16: return 4;
        case Modulation::qam64: return 6;
        case Modulation::qam256: return 8;
        case Modulation::qam1024: return 10;
    }
    return 0;
}

}  // namespace

Constellation::Constellation(Modulation m) : mod_(m), bits_(bits_for(m)) {
    const int half = bits_ / 2;
    levels_ = 1 << half;
    const std::size_t q = std::size_t{1} << bits_;
    scale_ = 1.0 / std::sqrt(2.0 / 3.0 * static_cast<double>(q - 1));

    // Level i has amplitude (L-1-2i)*scale and Gray label i ^ (i >> 1).
    level_to_gray_.resize(levels_);
    std::vector<int> gray_to_level(levels_);
    for (int i = 0; i < levels_; ++i) {
        level_to_gray_[i] = static_cast<unsigned>(i ^ (i >> 1));
        gray_to_level[level_to_gray_[i]] = i;
    }
    auto amplitude = [&](int level) { return (levels_ - 1 - 2 * level) * scale_; };

    points_.resize(q);
    energies_.resize(q);
    const unsigned qmask = (1u << half) - 1u;
    for (unsigned label = 0; label < q; ++label) {
        const int li = gray_to_level[label >> half];
        const int lq = gray_to_level[label & qmask];
        points_[label] = {amplitude(li), amplitude(lq)};
        const int ai = levels_ - 1 - 2 * li;
        const int aq = levels_ - 1 - 2 * lq;
        energies_[label] = 3.0 * (ai * ai + aq * aq) / (2.0 * static_cast<double>(q - 1));
    }
}

unsigned Constellation::slice_axis(double v) const {
    auto amplitude = [&](int level) { return (levels_ - 1 - 2 * level) * scale_; };
    const double t = ((levels_ - 1) - v / scale_) / 2.0;
    int i0 = static_cast<int>(std::floor(t));
    i0 = std::clamp(i0, 0, levels_ - 2);
    const double d0 = std::abs(v - amplitude(i0));
    const double d1 = std::abs(v - amplitude(i0 + 1));
    if (d0 < d1) return level_to_gray_[i0];
    if (d1 < d0) return level_to_gray_[i0 + 1];
    return std::min(level_to_gray_[i0], level_to_gray_[i0 + 1]);
}

unsigned Constellation::slice(cdouble v) const {
    const int half = bits_ / 2;
    return (slice_axis(v.real()) << half) | slice_axis(v.imag());
}

std::size_t pilot_count(int n, int m, double rho) {
    const double exact = rho * static_cast<double>(n) * static_cast<double>(m) / 100.0;
    return static_cast<std::size_t>(std::round(exact));
}

PilotPattern make_pilot_pattern(int n, int m, std::vector<GridIndex> indices) {
    if (n < 1 || m < 1) throw ConfigError("pilot grid dimensions must be positive");
    PilotPattern p;
    p.n_subc = n;
    p.n_sym = m;
    p.mask.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(m), 0);
    std::sort(indices.begin(), indices.end());
    for (const auto& idx : indices) {
        if (idx.subcarrier < 0 || idx.subcarrier >= n || idx.symbol < 0 || idx.symbol >= m)
            throw ConfigError("pilot index outside the grid");
        auto& cell = p.mask[static_cast<std::size_t>(idx.subcarrier) + static_cast<std::size_t>(n) * idx.symbol];
        if (cell) throw ConfigError("duplicate pilot index");
        cell = 1;
    }
    p.indices = std::move(indices);
    p.rho = 100.0 * static_cast<double>(p.indices.size()) / static_cast<double>(p.mask.size());
    return p;
}

PilotPattern generate_pilot_pattern(int n, int m, double rho, std::uint64_t seed) {
    if (!(rho >= 0.0 && rho <= 100.0)) throw ConfigError("pilot percentage must lie in [0, 100]");
    if (n < 1 || m < 1) throw ConfigError("pilot grid dimensions must be positive");
    const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(m);
    const std::size_t count = std::min(pilot_count(n, m, rho), total);

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(seed, Stream::pilots);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + uniform_below(rng, total - i);
        std::swap(order[i], order[j]);
    }

    std::vector<GridIndex> indices;
    indices.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        indices.push_back({static_cast<int>(order[i] % n), static_cast<int>(order[i] / n)});
    PilotPattern p = make_pilot_pattern(n, m, std::move(indices));
    p.rho = rho;
    return p;
}

TxFrame build_tx_frame(std::shared_ptr<const PilotPattern> pilots,
                       std::shared_ptr<const Constellation> constellation,
                       std::vector<std::uint8_t> bits, std::uint64_t pilot_seed) {
    const int bps = constellation->bits_per_symbol();
    if (bits.size() != pilots->data_cells() * static_cast<std::size_t>(bps))
        throw ConfigError("payload length " + std::to_string(bits.size()) + " does not match " +
                          std::to_string(pilots->data_cells()) + " data cells x " + std::to_string(bps) +
                          " bits");

    TxFrame f;
    f.x.resize(pilots->n_subc, pilots->n_sym);
    Rng rng = make_rng(pilot_seed, Stream::pilot_symbols);
    std::size_t bit = 0;
    cdouble* x = f.x.data();
    for (std::size_t i = 0; i < pilots->cells(); ++i) {
        if (pilots->is_pilot(i)) {
            const double k = static_cast<double>(uniform_below(rng, 4));
            x[i] = std::polar(1.0, kPi / 4.0 + k * kPi / 2.0);
        } else {
            unsigned label = 0;
            for (int b = 0; b < bps; ++b) label = (label << 1) | (bits[bit++] & 1u);
            x[i] = constellation->map(label);
        }
    }
    f.pilots = std::move(pilots);
    f.constellation = std::move(constellation);
    f.payload_bits = std::move(bits);
    return f;
}

TxFrame build_tx_frame(std::shared_ptr<const PilotPattern> pilots,
                       std::shared_ptr<const Constellation> constellation, std::uint64_t data_seed,
                       std::uint64_t pilot_seed) {
    std::vector<std::uint8_t> bits(pilots->data_cells() * constellation->bits_per_symbol());
    Rng rng = make_rng(data_seed, Stream::data);
    // 64 bits per draw.
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (i % 64 == 0) word = rng();
        bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return build_tx_frame(std::move(pilots), std::move(constellation), std::move(bits), pilot_seed);
}

HardDecisions demap_hard(const std::vector<cdouble>& symbols, const Constellation& constellation) {
    const int bps = constellation.bits_per_symbol();
    HardDecisions out;
    out.symbols.reserve(symbols.size());
    out.bits.reserve(symbols.size() * bps);
    for (const cdouble& s : symbols) {
        const unsigned label = constellation.slice(s);
        out.symbols.push_back(constellation.map(label));
        for (int b = bps - 1; b >= 0; --b) out.bits.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
    }
    return out;
}

void write_pilot_csv(const std::string& path, const PilotPattern& pilots) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "subcarrier,symbol\n";
    for (const auto& idx : pilots.indices) os << idx.subcarrier << ',' << idx.symbol << '\n';
}

PilotPattern read_pilot_csv(const std::string& path, int n, int m) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(is, line);
    std::vector<GridIndex> indices;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        GridIndex idx;
        char comma = 0;
        if (!(ls >> idx.subcarrier >> comma >> idx.symbol) || comma != ',')
            throw ConfigError("malformed pilot CSV line: " + line);
        indices.push_back(idx);
    }
    return make_pilot_pattern(n, m, std::move(indices));
}

}  // namespace isac
