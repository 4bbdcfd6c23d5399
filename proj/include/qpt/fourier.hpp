#pragma once

#include <complex>
#include <vector>

namespace qpt {

using Cplx = std::complex<double>;

bool is_power_of_two(std::size_t n);

/// Frequency carried by coefficient slot j of an N-point spectrum
/// (j for j < N/2, j - N otherwise; slot N/2 is the Nyquist mode -N/2).
inline int freq_of_index(std::size_t j, std::size_t n) {
    return j < n / 2 ? static_cast<int>(j) : static_cast<int>(j) - static_cast<int>(n);
}

/// Forward transform of a real grid sampled at theta_j = 2*pi*j/N into
/// Fourier coefficients c_k normalized so that grid_j = sum_k c_k e^{ik theta_j}.
std::vector<Cplx> to_fourier(const std::vector<double>& grid);

/// Inverse of to_fourier (real part of the synthesis).
std::vector<double> from_fourier(const std::vector<Cplx>& coeff);

/// Multiply mode k by e^{ik delta}; the unpaired Nyquist mode is treated as a
/// pure cosine (factor cos(k delta)) to keep real grids real.
void shift_spectrum(std::vector<Cplx>& coeff, double delta);

/// Multiply mode k by ik; the Nyquist mode is zeroed (its derivative is not
/// representable on the grid).
void derivative_spectrum(std::vector<Cplx>& coeff);

/// Trigonometric interpolation at an arbitrary angle.
double evaluate_spectrum(const std::vector<Cplx>& coeff, double theta);

/// Zero-padded spectrum of a larger (or truncated smaller) power-of-two size;
/// band-limited content is preserved exactly.
std::vector<Cplx> resize_spectrum(const std::vector<Cplx>& coeff, std::size_t new_n);

/// l2 norm of the coefficients with |frequency| >= band_start, and of all.
struct BandNorms {
    double band;
    double total;
};
BandNorms band_norms(const std::vector<Cplx>& coeff, int band_start);

/// Zero all modes with |frequency| >= band_start; returns the removed l2 mass.
double zero_band(std::vector<Cplx>& coeff, int band_start);

/// Unnormalized in-place radix-2 FFT (inverse applies conjugate twiddles, no
/// 1/N scaling).
void fft_inplace(std::vector<Cplx>& a, bool inverse);

}  // namespace qpt
