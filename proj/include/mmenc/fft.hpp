#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mmenc {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Unnormalized discrete Fourier transform of fixed length, backed by FFTW.
///
/// forward:  X_k = sum_n x_n exp(-j 2 pi k n / N)
/// backward: x_n = sum_k X_k exp(+j 2 pi k n / N)   (no 1/N)
///
/// Plan creation is serialized internally. A single Dft object must not be
/// used from two threads at once; separate objects may.
class Dft {
public:
    enum class Direction { forward, backward };

    Dft(std::size_t n, Direction dir);
    ~Dft();
    Dft(Dft&&) noexcept;
    Dft& operator=(Dft&&) noexcept;
    Dft(const Dft&) = delete;
    Dft& operator=(const Dft&) = delete;

    std::size_t size() const noexcept { return n_; }

    /// in and out must both have size(); they may alias.
    void execute(std::span<const cplx> in, std::span<cplx> out);

private:
    struct Impl;
    std::size_t n_ = 0;
    std::unique_ptr<Impl> impl_;
};

/// One-shot helpers.
CVec dft_forward(std::span<const cplx> x);
CVec dft_backward(std::span<const cplx> x);

} // namespace mmenc
