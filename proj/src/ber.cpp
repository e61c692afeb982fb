#include "mmenc/error.hpp"
#include "mmenc/ofdm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <string>
#include <thread>

namespace mmenc {

namespace {

// smallest 2^a 3^b 5^c 7^d >= n
std::size_t fast_size(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

// Used subcarriers in FFT bin order. Guards sit at both band edges of the
// centred spectrum; an odd guard total puts the extra null at the high edge.
std::vector<std::size_t> data_bins(const OfdmConfig& cfg) {
    const std::size_t n = cfg.n_fft;
    const std::size_t lo = cfg.n_guard_total / 2;
    const std::size_t hi = cfg.n_guard_total - lo;
    std::vector<std::size_t> bins;
    bins.reserve(cfg.n_user);
    for (std::size_t j = lo; j < n - hi; ++j) bins.push_back((j + n - n / 2) % n);
    return bins;
}

class BlockSimulator {
public:
    explicit BlockSimulator(const OfdmConfig& cfg)
        : cfg_(cfg),
          n_(cfg.n_fft),
          ncp_(cfg.n_cp),
          m_(fast_size(cfg.n_fft + cfg.n_cp)),
          bins_(data_bins(cfg)),
          ifft_(n_, Dft::Direction::backward),
          fft_(n_, Dft::Direction::forward),
          conv_fwd_(m_, Dft::Direction::forward),
          conv_bwd_(m_, Dft::Direction::backward),
          freq_(n_),
          time_(n_),
          tx_(m_),
          h_conv_(m_),
          h_sub_(n_) {
        if (cfg.bits_per_symbol != 1 && cfg.bits_per_symbol != 2)
            throw Error("simulate_ber: only BPSK (l = 1) and QPSK (l = 2) are supported");
    }

    std::uint64_t bits_per_block() const noexcept {
        return static_cast<std::uint64_t>(cfg_.bits_per_symbol) * bins_.size();
    }

    void set_channel(const ImpulseResponse& h) {
        const std::size_t len = support_length(h);
        if (len == 0) throw Error("simulate_ber: channel is identically zero");
        if (len > ncp_ + 1)
            throw Error("simulate_ber: channel length " + std::to_string(len) +
                        " samples exceeds cyclic prefix N_cp + 1 = " + std::to_string(ncp_ + 1));
        std::fill(tx_.begin(), tx_.end(), cplx{});
        std::fill(h_sub_.begin(), h_sub_.end(), cplx{});
        for (std::size_t k = 0; k < len; ++k) {
            tx_[k] = h.samples[k];
            h_sub_[k % n_] += h.samples[k];
        }
        conv_fwd_.execute(tx_, h_conv_);
        fft_.execute(h_sub_, h_sub_);
    }

    /// One block; returns bit errors.
    std::uint64_t run(Rng& rng, double noise_var) {
        const int l = cfg_.bits_per_symbol;
        const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n_));
        std::fill(freq_.begin(), freq_.end(), cplx{});
        tx_bits_.resize(bins_.size());

        std::uint64_t word = 0;
        int left = 0;
        auto next_bit = [&]() -> unsigned {
            if (left == 0) {
                word = rng();
                left = 64;
            }
            const unsigned b = static_cast<unsigned>(word & 1U);
            word >>= 1;
            --left;
            return b;
        };
        for (std::size_t i = 0; i < bins_.size(); ++i) {
            const unsigned b0 = next_bit();
            if (l == 1) {
                tx_bits_[i] = b0;
                freq_[bins_[i]] = b0 ? -1.0 : 1.0;
            } else {
                const unsigned b1 = next_bit();
                tx_bits_[i] = b0 | (b1 << 1);
                freq_[bins_[i]] = cplx(b0 ? -1.0 : 1.0, b1 ? -1.0 : 1.0) * std::numbers::sqrt2 * 0.5;
            }
        }
        ifft_.execute(freq_, time_);
        for (auto& s : time_) s *= inv_sqrt_n;

        // cyclic prefix + body, then linear convolution through an M-point
        // circular one (no wrap reaches the kept samples since L - 1 <= N_cp)
        std::fill(tx_.begin(), tx_.end(), cplx{});
        for (std::size_t i = 0; i < n_ + ncp_; ++i) tx_[i] = time_[(i + n_ - ncp_ % n_) % n_];
        conv_fwd_.execute(tx_, tx_);
        for (std::size_t k = 0; k < m_; ++k) tx_[k] *= h_conv_[k];
        conv_bwd_.execute(tx_, tx_);
        const double inv_m = 1.0 / static_cast<double>(m_);

        std::normal_distribution<double> noise(0.0, std::sqrt(noise_var / 2.0));
        for (std::size_t i = 0; i < n_; ++i) {
            time_[i] = tx_[ncp_ + i] * inv_m;
            if (noise_var > 0.0) {
                const double re = noise(rng);
                const double im = noise(rng);
                time_[i] += cplx(re, im);
            }
        }
        fft_.execute(time_, freq_);

        std::uint64_t errors = 0;
        for (std::size_t i = 0; i < bins_.size(); ++i) {
            const cplx z = freq_[bins_[i]] * inv_sqrt_n / h_sub_[bins_[i]];
            unsigned rx = z.real() < 0.0 ? 1U : 0U;
            if (l == 2) rx |= (z.imag() < 0.0 ? 1U : 0U) << 1;
            errors += static_cast<std::uint64_t>(std::popcount(rx ^ tx_bits_[i]));
        }
        return errors;
    }

private:
    OfdmConfig cfg_;
    std::size_t n_, ncp_, m_;
    std::vector<std::size_t> bins_;
    Dft ifft_, fft_, conv_fwd_, conv_bwd_;
    CVec freq_, time_, tx_, h_conv_, h_sub_;
    std::vector<unsigned> tx_bits_;
};

ImpulseResponse prepare_fixed(const OfdmConfig& cfg, const ImpulseResponse& channel) {
    auto h = resample(channel, cfg.symbol_period_s());
    const double e = h.total_power();
    if (!(e > 0.0)) throw Error("simulate_ber: channel is identically zero");
    const double g = 1.0 / std::sqrt(e);
    for (auto& s : h.samples) s *= g;
    return h;
}

BerPoint run_point(const OfdmConfig& cfg, const ImpulseResponse* fixed, const ChannelDraw* draw, double eb_n0_db,
                   std::size_t point_index, const StopRule& stop, std::uint64_t seed) {
    BlockSimulator sim(cfg);
    if (fixed) sim.set_channel(*fixed);

    // Es per transmitted sample is N_u / N with unit-modulus symbols and a
    // unitary transform; N0 follows from Es/N0.
    const double es = static_cast<double>(cfg.n_user) / static_cast<double>(cfg.n_fft);
    const double noise_var =
        std::isinf(eb_n0_db) && eb_n0_db > 0 ? 0.0 : es / std::pow(10.0, es_n0_from_eb_n0(eb_n0_db, cfg) / 10.0);

    const std::uint64_t per_block = sim.bits_per_block();
    const std::uint64_t blocks_per_batch = std::max<std::uint64_t>(1, (65536 + per_block - 1) / per_block);

    BerPoint pt;
    pt.eb_n0_db = eb_n0_db;
    for (std::uint64_t batch = 0;; ++batch) {
        Rng rng = make_rng(seed, {kStreamBer, point_index, batch});
        for (std::uint64_t b = 0; b < blocks_per_batch; ++b) {
            if (draw) sim.set_channel(resample((*draw)(rng), cfg.symbol_period_s()));
            pt.errors += sim.run(rng, noise_var);
            pt.bits += per_block;
        }
        if (pt.bits >= stop.min_bits && pt.errors >= stop.min_errors) break;
        if (pt.bits >= stop.max_bits) {
            pt.capped = pt.errors < stop.min_errors;
            break;
        }
    }
    pt.ber = static_cast<double>(pt.errors) / static_cast<double>(pt.bits);
    return pt;
}

BerCurve run_curve(const OfdmConfig& cfg, const ImpulseResponse* fixed, const ChannelDraw* draw,
                   std::span<const double> grid, const StopRule& stop, std::uint64_t seed, std::string label) {
    validate(cfg);
    if (grid.empty()) throw Error("simulate_ber: empty Eb/N0 grid");
    if (stop.max_bits < stop.min_bits) throw Error("simulate_ber: max_bits below min_bits");

    BerCurve curve;
    curve.config = cfg;
    curve.channel_label = std::move(label);
    curve.seed = seed;
    curve.points.resize(grid.size());

    // grid points are independent; each owns its RNG streams
    const std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < grid.size(); start += workers) {
        std::vector<std::future<BerPoint>> jobs;
        for (std::size_t i = start; i < std::min(grid.size(), start + workers); ++i)
            jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, run_point,
                                      std::cref(cfg), fixed, draw, grid[i], i, std::cref(stop), seed));
        for (std::size_t j = 0; j < jobs.size(); ++j) curve.points[start + j] = jobs[j].get();
    }
    return curve;
}

} // namespace

BerCurve simulate_ber(const OfdmConfig& cfg, const ImpulseResponse& channel, std::span<const double> grid,
                      const StopRule& stop, std::uint64_t seed, std::string label) {
    validate(cfg);
    const auto h = prepare_fixed(cfg, channel);
    // fail before any work when the channel does not fit the prefix
    BlockSimulator(cfg).set_channel(h);
    return run_curve(cfg, &h, nullptr, grid, stop, seed, std::move(label));
}

BerCurve simulate_ber(const OfdmConfig& cfg, const ChannelDraw& draw, std::span<const double> grid,
                      const StopRule& stop, std::uint64_t seed, std::string label) {
    if (!draw) throw Error("simulate_ber: empty channel generator");
    return run_curve(cfg, nullptr, &draw, grid, stop, seed, std::move(label));
}

} // namespace mmenc
