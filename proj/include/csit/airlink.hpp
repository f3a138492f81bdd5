#pragma once

#include <cstdint>
#include <vector>

#include "csit/numerics.hpp"

namespace csit {

/// Downlink training block. `samples` is the transmitted M x T matrix
/// X = A_T * Z; every column carries squared norm exactly P. `angular_design`
/// keeps the underlying sign matrix Z (entries +-sqrt(P/M)) so tests can
/// cross-check the effective sensing matrix against it.
struct PilotMatrix {
    ComplexMatrix samples;         // X, M x T
    ComplexMatrix angular_design;  // Z, M x T, real +-sqrt(P/M)
    double power = 0.0;            // P
};

/// One user's quantized feedback: the T x N sign matrix packed two bits per
/// complex entry (real sign then imaginary sign, row-major over (t, n),
/// bit value 1 <=> sign +1, filling each byte from the low-order bit up).
struct FeedbackFrame {
    std::size_t user = 0;
    std::size_t pilot_count = 0;   // T
    std::size_t rx_antennas = 0;   // N
    std::vector<std::uint8_t> payload;

    std::size_t bit_count() const { return 2 * pilot_count * rx_antennas; }
};

/// Draws Z with i.i.d. equiprobable +-sqrt(P/M) entries (row-major order) and
/// returns X = A_T * Z. Throws ConfigError for P <= 0 or empty shapes.
PilotMatrix design_pilots(std::size_t bts_antennas, std::size_t pilot_count, double power,
                          RandomSource& rng);

/// Received block Y = H X + noise, with i.i.d. CN(0,1) noise entries drawn
/// row-major. Muting the source's noise channel gives the deterministic H X.
ComplexMatrix downlink_receive(const ComplexMatrix& channel, const PilotMatrix& pilots,
                               RandomSource& rng);

/// One-bit quantizer per complex dimension: sign(Re) + j sign(Im) with
/// sign(0) := +1, so every output is one of {1+j, 1-j, -1+j, -1-j}.
ComplexMatrix quantize(const ComplexMatrix& z);

/// Receiver post-processing and quantization: packs Q(Y^H A_R) for uplink
/// feedback. `received` is the N x T block seen by the user.
FeedbackFrame receiver_feedback(const ComplexMatrix& received, std::size_t rx_antennas,
                                std::size_t user = 0);

/// Bit-exact wire format for a sign matrix; see FeedbackFrame for the layout.
/// pack_bits rejects entries outside {+-1 +- j}; unpack_bits rejects byte
/// sequences of the wrong length.
std::vector<std::uint8_t> pack_bits(const ComplexMatrix& signs);
ComplexMatrix unpack_bits(const std::vector<std::uint8_t>& payload, std::size_t pilot_count,
                          std::size_t rx_antennas);

/// Payload size in bytes for a T x N frame.
std::size_t frame_payload_bytes(std::size_t pilot_count, std::size_t rx_antennas);

/// Recovers the T x N sign matrix carried by a frame.
ComplexMatrix unpack_frame(const FeedbackFrame& frame);

}  // namespace csit
