#include "mmenc/dsp.hpp"

#include "mmenc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mmenc {

SweepGeometry sweep_geometry(double f_min_hz, double f_max_hz, std::size_t n_points) {
    if (!std::isfinite(f_min_hz) || !std::isfinite(f_max_hz) || !(f_max_hz > f_min_hz))
        throw Error("sweep_geometry: bandwidth must be positive");
    if (n_points < 2) throw Error("sweep_geometry: need at least 2 points");
    return SweepGeometry{f_min_hz, f_max_hz, n_points};
}

bool same_geometry(const SweepGeometry& a, const SweepGeometry& b, double rel_tol) {
    if (a.n_points != b.n_points) return false;
    const double scale = std::max({std::abs(a.f_max_hz), std::abs(b.f_max_hz), a.bandwidth_hz()});
    return std::abs(a.f_min_hz - b.f_min_hz) <= rel_tol * scale &&
           std::abs(a.f_max_hz - b.f_max_hz) <= rel_tol * scale;
}

double ImpulseResponse::total_power() const noexcept {
    double p = 0.0;
    for (const auto& s : samples) p += std::norm(s);
    return p;
}

Window parse_window(std::string_view name) {
    if (name == "hann") return Window::hann;
    if (name == "none") return Window::none;
    throw Error("unknown window '" + std::string(name) + "' (expected hann|none)");
}

std::string_view to_string(Window w) noexcept {
    return w == Window::hann ? "hann" : "none";
}

std::vector<double> window_coefficients(Window kind, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (kind == Window::hann && n > 1) {
        const double denom = static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom));
        // exact endpoints and centre
        w.front() = 0.0;
        w.back() = 0.0;
        if (n % 2 == 1) w[(n - 1) / 2] = 1.0;
    }
    return w;
}

FrequencySweep apply_window(const FrequencySweep& sweep, Window kind) {
    FrequencySweep out = sweep;
    if (kind == Window::none) return out;
    const auto w = window_coefficients(kind, out.samples.size());
    for (std::size_t i = 0; i < w.size(); ++i) out.samples[i] *= w[i];
    return out;
}

ImpulseResponse cfr_to_cir(const FrequencySweep& sweep, Window kind) {
    if (sweep.samples.size() != sweep.geometry.n_points)
        throw Error("cfr_to_cir: sample count does not match geometry");
    const auto windowed = apply_window(sweep, kind);
    ImpulseResponse cir;
    cir.sample_period_s = sweep.geometry.resolution_s();
    cir.t0_s = 0.0;
    cir.samples = dft_backward(windowed.samples);
    const double inv_n = 1.0 / static_cast<double>(cir.samples.size());
    for (auto& s : cir.samples) s *= inv_n;
    return cir;
}

FrequencySweep cir_to_cfr(const ImpulseResponse& cir, double f_min_hz, std::string label) {
    if (cir.samples.size() < 2) throw Error("cir_to_cfr: need at least 2 samples");
    if (!(cir.sample_period_s > 0.0)) throw Error("cir_to_cfr: non-positive sample period");
    FrequencySweep out;
    out.geometry = sweep_geometry(f_min_hz, f_min_hz + 1.0 / cir.sample_period_s, cir.samples.size());
    out.samples = dft_forward(cir.samples);
    out.label = std::move(label);
    return out;
}

FrequencySweep inverse_filter(const FrequencySweep& measured, const FrequencySweep& reference,
                              double floor) {
    if (!same_geometry(measured.geometry, reference.geometry) ||
        measured.samples.size() != reference.samples.size())
        throw Error("inverse_filter: measured and reference geometries differ");
    double peak = 0.0;
    for (const auto& r : reference.samples) peak = std::max(peak, std::abs(r));
    if (!(peak > 0.0)) throw Error("inverse_filter: reference is identically zero");
    const double min_mag = floor * peak;

    FrequencySweep out;
    out.geometry = measured.geometry;
    out.label = measured.label;
    out.samples.resize(measured.samples.size());
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        cplx r = reference.samples[i];
        const double mag = std::abs(r);
        if (mag < min_mag) r = mag > 0.0 ? r * (min_mag / mag) : cplx(min_mag, 0.0);
        out.samples[i] = measured.samples[i] / r;
    }
    return out;
}

ImpulseResponse time_gate(const ImpulseResponse& cir, double t_start_s, double t_stop_s) {
    if (!(t_stop_s > t_start_s)) throw Error("time_gate: empty gate");
    ImpulseResponse out = cir;
    // half-open gate; the slack absorbs rounding in t0 + k * Ts
    const double eps = 1e-6 * cir.sample_period_s;
    for (std::size_t k = 0; k < out.samples.size(); ++k) {
        const double t = out.time_s(k);
        if (t < t_start_s - eps || t >= t_stop_s - eps) out.samples[k] = 0.0;
    }
    return out;
}

PeakNormalized normalize_peak(const ImpulseResponse& cir) {
    double peak = 0.0;
    for (const auto& s : cir.samples) peak = std::max(peak, std::norm(s));
    if (!(peak > 0.0)) throw Error("normalize_peak: all-zero impulse response");
    PeakNormalized out{cir, -10.0 * std::log10(peak)};
    const double g = 1.0 / std::sqrt(peak);
    for (auto& s : out.cir.samples) s *= g;
    return out;
}

FrequencySweep reference_correction(const FrequencySweep& h, double reference_distance_m) {
    if (!(reference_distance_m > 0.0)) throw Error("reference_correction: distance must be positive");
    FrequencySweep out = h;
    const double tau = reference_distance_m / kSpeedOfLight;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double f = out.geometry.frequency_hz(i);
        const double amp = f > 0.0 ? kSpeedOfLight / (4.0 * std::numbers::pi * f * reference_distance_m) : 1.0;
        out.samples[i] *= std::polar(amp, -2.0 * std::numbers::pi * f * tau);
    }
    return out;
}

FrequencySweep average_sweeps(std::span<const FrequencySweep> sweeps) {
    if (sweeps.empty()) throw Error("average_sweeps: no sweeps");
    FrequencySweep out = sweeps.front();
    for (std::size_t j = 1; j < sweeps.size(); ++j) {
        if (!same_geometry(out.geometry, sweeps[j].geometry))
            throw Error("average_sweeps: geometry mismatch");
        for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += sweeps[j].samples[i];
    }
    const double inv = 1.0 / static_cast<double>(sweeps.size());
    for (auto& s : out.samples) s *= inv;
    return out;
}

FrequencySweep gated_reference(const FrequencySweep& reference, double gate_stop_s) {
    auto cir = time_gate(cfr_to_cir(reference, Window::none), 0.0, gate_stop_s);
    return cir_to_cfr(cir, reference.geometry.f_min_hz, reference.label);
}

ImpulseResponse sounding_to_cir(const FrequencySweep& measured, const FrequencySweep* reference,
                                const SoundingOptions& opt) {
    FrequencySweep h = measured;
    if (reference) {
        h = inverse_filter(measured, gated_reference(*reference, opt.reference_gate_stop_s), opt.floor);
        if (opt.reference_distance_m) h = reference_correction(h, *opt.reference_distance_m);
    }
    auto cir = cfr_to_cir(h, opt.window);
    if (opt.gate) cir = time_gate(cir, opt.gate->first, opt.gate->second);
    return cir;
}

ImpulseResponse resample(const ImpulseResponse& cir, double sample_period_s) {
    if (!(sample_period_s > 0.0)) throw Error("resample: non-positive sample period");
    if (std::abs(cir.sample_period_s - sample_period_s) <= 1e-12 * sample_period_s) return cir;
    ImpulseResponse out;
    out.sample_period_s = sample_period_s;
    out.t0_s = cir.t0_s;
    const double ratio = cir.sample_period_s / sample_period_s;
    for (std::size_t k = 0; k < cir.samples.size(); ++k) {
        if (cir.samples[k] == cplx{}) continue;
        const auto bin = static_cast<std::size_t>(std::llround(static_cast<double>(k) * ratio));
        if (bin >= out.samples.size()) out.samples.resize(bin + 1);
        out.samples[bin] += cir.samples[k];
    }
    if (out.samples.empty()) out.samples.assign(1, cplx{});
    return out;
}

std::size_t support_length(const ImpulseResponse& cir) noexcept {
    std::size_t n = cir.samples.size();
    while (n > 0 && cir.samples[n - 1] == cplx{}) --n;
    return n;
}

} // namespace mmenc
