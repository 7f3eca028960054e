#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "tqm/common.hpp"

namespace tqm {

// In-place complex FFT over a subset of axes of a row-major array.
// sign = -1 is FFTW_FORWARD. No normalization is applied.
class FftPlan {
public:
    FftPlan(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& axes, int sign);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&&) noexcept;
    FftPlan& operator=(FftPlan&&) noexcept;

    void execute(cplx* data) const;
    std::size_t transform_size() const { return transform_size_; }

private:
    void* plan_ = nullptr;
    std::size_t transform_size_ = 1;
};

// FFT bin angular frequency for index k of an n-point grid with spacing h.
double fft_frequency(std::size_t k, std::size_t n, double h);

}  // namespace tqm
