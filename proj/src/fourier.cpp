#include "qpt/fourier.hpp"

#include <cmath>
#include <numbers>

#include "qpt/errors.hpp"

namespace qpt {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace {

void check_length(std::size_t n) {
    if (!is_power_of_two(n))
        throw ConfigError("fourier: grid length must be a power of two, got " + std::to_string(n));
}

}  // namespace

void fft_inplace(std::vector<Cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    check_length(n);
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Cplx w = std::polar(1.0, ang * static_cast<double>(k));
                const Cplx u = a[i + k];
                const Cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

std::vector<Cplx> to_fourier(const std::vector<double>& grid) {
    check_length(grid.size());
    std::vector<Cplx> a(grid.begin(), grid.end());
    fft_inplace(a, false);
    const double inv_n = 1.0 / static_cast<double>(grid.size());
    for (auto& c : a) c *= inv_n;
    return a;
}

std::vector<double> from_fourier(const std::vector<Cplx>& coeff) {
    std::vector<Cplx> a = coeff;
    fft_inplace(a, true);
    std::vector<double> grid(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) grid[j] = a[j].real();
    return grid;
}

void shift_spectrum(std::vector<Cplx>& coeff, double delta) {
    const std::size_t n = coeff.size();
    check_length(n);
    for (std::size_t j = 0; j < n; ++j) {
        const int k = freq_of_index(j, n);
        if (j == n / 2) {
            coeff[j] *= std::cos(k * delta);
        } else {
            coeff[j] *= std::polar(1.0, k * delta);
        }
    }
}

void derivative_spectrum(std::vector<Cplx>& coeff) {
    const std::size_t n = coeff.size();
    check_length(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == n / 2) {
            coeff[j] = 0.0;
        } else {
            coeff[j] *= Cplx(0.0, static_cast<double>(freq_of_index(j, n)));
        }
    }
}

double evaluate_spectrum(const std::vector<Cplx>& coeff, double theta) {
    const std::size_t n = coeff.size();
    check_length(n);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const int k = freq_of_index(j, n);
        if (j == n / 2) {
            sum += coeff[j].real() * std::cos(k * theta);
        } else {
            sum += (coeff[j] * std::polar(1.0, k * theta)).real();
        }
    }
    return sum;
}

std::vector<Cplx> resize_spectrum(const std::vector<Cplx>& coeff, std::size_t new_n) {
    const std::size_t n = coeff.size();
    check_length(n);
    check_length(new_n);
    std::vector<Cplx> out(new_n, Cplx(0.0, 0.0));
    if (new_n >= n) {
        for (std::size_t j = 0; j < n; ++j) {
            const int k = freq_of_index(j, n);
            if (j == n / 2) {
                // split the unpaired cosine mode symmetrically
                out[n / 2] += 0.5 * coeff[j];
                out[new_n - n / 2] += 0.5 * coeff[j];
            } else {
                out[k >= 0 ? static_cast<std::size_t>(k) : new_n + k] = coeff[j];
            }
        }
    } else {
        for (std::size_t j = 0; j < new_n; ++j) {
            const int k = freq_of_index(j, new_n);
            if (j == new_n / 2) {
                out[j] = coeff[static_cast<std::size_t>(k >= 0 ? k : static_cast<int>(n) + k)];
            } else {
                out[j] = coeff[k >= 0 ? static_cast<std::size_t>(k) : n + k];
            }
        }
    }
    return out;
}

BandNorms band_norms(const std::vector<Cplx>& coeff, int band_start) {
    const std::size_t n = coeff.size();
    double band = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double m = std::norm(coeff[j]);
        total += m;
        if (std::abs(freq_of_index(j, n)) >= band_start) band += m;
    }
    return BandNorms{std::sqrt(band), std::sqrt(total)};
}

double zero_band(std::vector<Cplx>& coeff, int band_start) {
    const std::size_t n = coeff.size();
    double removed = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(freq_of_index(j, n)) >= band_start) {
            removed += std::norm(coeff[j]);
            coeff[j] = 0.0;
        }
    }
    return std::sqrt(removed);
}

}  // namespace qpt
