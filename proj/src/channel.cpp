#include "isac/channel.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "isac/rng.hpp"

namespace isac {

CVector steering_freq(double tau, int n, double df) {
    CVector b(n);
    for (int i = 0; i < n; ++i) b[i] = std::polar(1.0, -2.0 * kPi * i * df * tau);
    return b;
}

CVector steering_time(double nu, int m, double t_sym) {
    CVector c(m);
    for (int i = 0; i < m; ++i) c[i] = std::polar(1.0, 2.0 * kPi * i * t_sym * nu);
    return c;
}

ChannelMatrix synthesize_channel(const PathSet& paths, const WaveformConfig& wf) {
    ChannelMatrix out;
    out.h = CGrid::Zero(wf.n_subc, wf.n_sym);
    for (const auto& p : paths.paths) {
        const CVector b = steering_freq(p.delay, wf.n_subc, wf.df);
        const CVector c = steering_time(p.doppler, wf.n_sym, wf.symbol_duration());
        out.h.noalias() += p.gain * (b * c.transpose());
    }
    return out;
}

RxFrame apply_channel(const TxFrame& x, const ChannelMatrix& h, double sigma2, std::uint64_t seed,
                      PathSet truth) {
    if (x.x.rows() != h.h.rows() || x.x.cols() != h.h.cols())
        throw std::invalid_argument("apply_channel: X is " + std::to_string(x.x.rows()) + "x" +
                                    std::to_string(x.x.cols()) + " but H is " + std::to_string(h.h.rows()) +
                                    "x" + std::to_string(h.h.cols()));
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("apply_channel: negative noise variance");

    RxFrame out;
    out.y = x.x.cwiseProduct(h.h);
    out.truth = std::move(truth);
    if (sigma2 > 0.0) {
        Rng rng = make_rng(seed, Stream::noise);
        std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2 / 2.0));
        cdouble* y = out.y.data();
        for (Eigen::Index i = 0; i < out.y.size(); ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            y[i] += cdouble(re, im);
        }
    }
    return out;
}

namespace {

static_assert(std::endian::native == std::endian::little, "grid dumps assume a little-endian host");

void write_sidecar(const std::string& path, Eigen::Index rows, Eigen::Index cols, bool complex) {
    nlohmann::json meta = {
        {"rows", rows},
        {"cols", cols},
        {"dtype", complex ? "complex128" : "float64"},
        {"layout", complex ? "row-major, interleaved re/im, little-endian" : "row-major, little-endian"},
        {"rows_axis", "subcarrier"},
        {"cols_axis", "symbol"},
    };
    std::ofstream os(path + ".json");
    if (!os) throw std::runtime_error("cannot open " + path + ".json for writing");
    os << meta.dump(2) << '\n';
}

}  // namespace

void write_grid(const std::string& path, const CGrid& grid) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    for (Eigen::Index r = 0; r < grid.rows(); ++r)
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            const double v[2] = {grid(r, c).real(), grid(r, c).imag()};
            os.write(reinterpret_cast<const char*>(v), sizeof v);
        }
    write_sidecar(path, grid.rows(), grid.cols(), true);
}

void write_grid(const std::string& path, const RGrid& grid) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    for (Eigen::Index r = 0; r < grid.rows(); ++r)
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            const double v = grid(r, c);
            os.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    write_sidecar(path, grid.rows(), grid.cols(), false);
}

CGrid read_grid(const std::string& path) {
    std::ifstream meta_is(path + ".json");
    if (!meta_is) throw std::runtime_error("missing sidecar " + path + ".json");
    const auto meta = nlohmann::json::parse(meta_is);
    const Eigen::Index rows = meta.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = meta.at("cols").get<Eigen::Index>();
    const bool complex = meta.at("dtype").get<std::string>() == "complex128";

    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    CGrid g(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            double v[2] = {0.0, 0.0};
            is.read(reinterpret_cast<char*>(v), complex ? sizeof v : sizeof v[0]);
            if (!is) throw std::runtime_error("truncated grid file " + path);
            g(r, c) = {v[0], v[1]};
        }
    return g;
}

}  // namespace isac
