#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>

namespace moyal::detail {

// In-place batched 1D FFT with cached FFTW plans. `sign` is FFTW_FORWARD
// (-1) or FFTW_BACKWARD (+1); no normalization is applied.
inline void fft_many(std::complex<double>* data, int n, int howmany, int stride, int dist,
                     int sign) {
    using Key = std::tuple<int, int, int, int, int>;
    static std::map<Key, fftw_plan> plans;
    static std::mutex mtx;

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(mtx);
        Key key{n, howmany, stride, dist, sign};
        auto it = plans.find(key);
        if (it == plans.end()) {
            auto* ptr = reinterpret_cast<fftw_complex*>(data);
            int dims[1] = {n};
            plan = fftw_plan_many_dft(1, dims, howmany, ptr, nullptr, stride, dist, ptr, nullptr,
                                      stride, dist, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
            plans.emplace(key, plan);
        } else {
            plan = it->second;
        }
    }
    auto* ptr = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, ptr, ptr);
}

inline void fft_1d(std::complex<double>* data, int n, int sign) { fft_many(data, n, 1, 1, n, sign); }

}  // namespace moyal::detail
