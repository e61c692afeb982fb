#include "mmenc/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace mmenc {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct Dft::Impl {
    fftw_complex* buf = nullptr;
    fftw_plan plan = nullptr;

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (plan) fftw_destroy_plan(plan);
        if (buf) fftw_free(buf);
    }
};

Dft::Dft(std::size_t n, Direction dir) : n_(n), impl_(std::make_unique<Impl>()) {
    if (n == 0) throw std::invalid_argument("Dft: zero length");
    std::lock_guard lock(planner_mutex());
    impl_->buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!impl_->buf) throw std::bad_alloc();
    impl_->plan = fftw_plan_dft_1d(static_cast<int>(n), impl_->buf, impl_->buf,
                                   dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
    if (!impl_->plan) throw std::runtime_error("Dft: FFTW planning failed");
}

Dft::~Dft() = default;
Dft::Dft(Dft&&) noexcept = default;
Dft& Dft::operator=(Dft&&) noexcept = default;

void Dft::execute(std::span<const cplx> in, std::span<cplx> out) {
    if (in.size() != n_ || out.size() != n_) throw std::invalid_argument("Dft: size mismatch");
    auto* b = reinterpret_cast<cplx*>(impl_->buf);
    std::copy(in.begin(), in.end(), b);
    fftw_execute(impl_->plan);
    std::copy(b, b + n_, out.begin());
}

CVec dft_forward(std::span<const cplx> x) {
    CVec out(x.size());
    Dft(x.size(), Dft::Direction::forward).execute(x, out);
    return out;
}

CVec dft_backward(std::span<const cplx> x) {
    CVec out(x.size());
    Dft(x.size(), Dft::Direction::backward).execute(x, out);
    return out;
}

} // namespace mmenc
