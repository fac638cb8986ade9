#pragma once

#include <span>

namespace asvobs {

enum class Window {
    Rectangular,  // exact Parseval split of the record
    Hann,         // periodic Hann, power renormalised by mean(w²); keeps strong
                  // out-of-band tones from leaking into a weak band
};

/// RMS of the part of `x` whose frequency lies in [f_lo, f_hi] Hz, from the
/// one-sided DFT of the record (DC bin included when f_lo ≤ 0). Throws
/// EmptyWindow on an empty record.
double band_rms(std::span<const double> x, double dt, double f_lo, double f_hi,
                Window window = Window::Rectangular);

/// Fraction of the record's energy (mean square) inside [f_lo, f_hi] Hz.
double band_energy_fraction(std::span<const double> x, double dt, double f_lo, double f_hi);

}  // namespace asvobs
