#pragma once

#include <complex>
#include <vector>

namespace mitf {

// In-order complex DFT, forward = e^{-2pi i jk/n}. Backed by FFTW with a
// process-wide plan cache; safe for concurrent calls on distinct data.
void fft(std::vector<std::complex<double>>& data, bool inverse);

std::vector<std::complex<double>> fft_copy(const std::vector<std::complex<double>>& data,
                                           bool inverse);

}  // namespace mitf
