#include "cbf/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace cbf::fft {

namespace {

using cd = std::complex<double>;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct Twiddles {
    std::vector<cd> wf;  // e^{-2pi i j/n}
    std::vector<cd> wb;  // e^{+2pi i j/n}
};

const Twiddles& twiddles_for(int n) {
    static std::map<int, Twiddles> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
        Twiddles t;
        t.wf.resize(n);
        t.wb.resize(n);
        for (int j = 0; j < n; ++j) {
            double ang = 2.0 * M_PI * j / n;
            t.wf[j] = cd(std::cos(ang), -std::sin(ang));
            t.wb[j] = cd(std::cos(ang), std::sin(ang));
        }
        it = cache.emplace(n, std::move(t)).first;
    }
    return it->second;
}

void fft_radix2(cd* a, int n, bool forward) {
    const Twiddles& tw = twiddles_for(n);
    const std::vector<cd>& w = forward ? tw.wf : tw.wb;
    // bit-reversal permutation
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        int step = n / len;
        for (int i = 0; i < n; i += len) {
            for (int j = 0; j < len / 2; ++j) {
                cd u = a[i + j];
                cd v = a[i + j + len / 2] * w[static_cast<std::size_t>(j) * step];
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

void dft_direct(cd* a, int n, bool forward) {
    const Twiddles& tw = twiddles_for(n);
    const std::vector<cd>& w = forward ? tw.wf : tw.wb;
    std::vector<cd> out(n);
    for (int k = 0; k < n; ++k) {
        cd s(0.0, 0.0);
        for (int j = 0; j < n; ++j) s += a[j] * w[(static_cast<long long>(j) * k) % n];
        out[k] = s;
    }
    for (int k = 0; k < n; ++k) a[k] = out[k];
}

}  // namespace

void transform_1d(cd* line, int n, bool forward) {
    if (is_pow2(n))
        fft_radix2(line, n, forward);
    else
        dft_direct(line, n, forward);
    if (forward) {
        const double s = 1.0 / n;
        for (int j = 0; j < n; ++j) line[j] *= s;
    }
}

void transform_nd(std::vector<cd>& data, int d, int n, bool forward) {
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
    if (data.size() != total) throw std::invalid_argument("transform_nd: size mismatch");

    std::vector<cd> line(n);
    // axis a has stride = n^(d-1-a) in row-major layout
    std::size_t stride = total / n;
    for (int axis = 0; axis < d; ++axis) {
        std::size_t nlines = total / n;
        for (std::size_t l = 0; l < nlines; ++l) {
            // decompose l into (outer, inner): outer blocks of size stride
            std::size_t outer = l / stride;
            std::size_t inner = l % stride;
            std::size_t base = outer * stride * n + inner;
            for (int j = 0; j < n; ++j) line[j] = data[base + static_cast<std::size_t>(j) * stride];
            transform_1d(line.data(), n, forward);
            for (int j = 0; j < n; ++j) data[base + static_cast<std::size_t>(j) * stride] = line[j];
        }
        stride /= n;
    }
}

}  // namespace cbf::fft
