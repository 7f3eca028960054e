#include "tqm/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace tqm {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftPlan::FftPlan(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& axes, int sign) {
    const int rank = int(dims.size());
    std::vector<std::ptrdiff_t> stride(rank);
    std::ptrdiff_t s = 1;
    for (int i = rank - 1; i >= 0; --i) {
        stride[i] = s;
        s *= std::ptrdiff_t(dims[i]);
    }
    std::vector<bool> is_tr(rank, false);
    for (auto a : axes) is_tr.at(a) = true;
    std::vector<fftw_iodim64> tr, loop;
    for (int i = 0; i < rank; ++i) {
        fftw_iodim64 d{std::ptrdiff_t(dims[i]), stride[i], stride[i]};
        if (is_tr[i]) {
            tr.push_back(d);
            transform_size_ *= dims[i];
        } else {
            loop.push_back(d);
        }
    }
    // FFTW_ESTIMATE never touches the arrays, so a small probe stands in for in == out.
    // FFTW_UNALIGNED lets the plan run on any std::vector storage.
    std::vector<fftw_complex> probe(4);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_guru64_dft(int(tr.size()), tr.data(), int(loop.size()), loop.data(), probe.data(),
                                 probe.data(), sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw std::runtime_error("fftw planning failed");
}

FftPlan::~FftPlan() {
    if (plan_) {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
}

FftPlan::FftPlan(FftPlan&& o) noexcept : plan_(o.plan_), transform_size_(o.transform_size_) { o.plan_ = nullptr; }

FftPlan& FftPlan::operator=(FftPlan&& o) noexcept {
    std::swap(plan_, o.plan_);
    std::swap(transform_size_, o.transform_size_);
    return *this;
}

void FftPlan::execute(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_), p, p);
}

double fft_frequency(std::size_t k, std::size_t n, double h) {
    const double kk = k < (n + 1) / 2 ? double(k) : double(k) - double(n);
    return 2.0 * pi * kk / (double(n) * h);
}

}  // namespace tqm
