#include "csit/airlink.hpp"

#include <cmath>
#include <string>

namespace csit {

PilotMatrix design_pilots(std::size_t bts_antennas, std::size_t pilot_count, double power,
                          RandomSource& rng) {
    if (bts_antennas == 0 || pilot_count == 0) {
        throw ConfigError("pilot design requires M >= 1 and T >= 1");
    }
    if (!(power > 0.0)) {
        throw ConfigError("transmit power must be positive");
    }
    const double amplitude = std::sqrt(power / static_cast<double>(bts_antennas));
    ComplexMatrix design(bts_antennas, pilot_count);
    for (std::size_t r = 0; r < bts_antennas; ++r) {
        for (std::size_t c = 0; c < pilot_count; ++c) {
            design(r, c) = cplx{amplitude * rng.rademacher(), 0.0};
        }
    }
    PilotMatrix pilots;
    pilots.samples = multiply(dft_unitary_cached(bts_antennas), design);
    pilots.angular_design = std::move(design);
    pilots.power = power;
    return pilots;
}

ComplexMatrix downlink_receive(const ComplexMatrix& channel, const PilotMatrix& pilots,
                               RandomSource& rng) {
    if (channel.cols() != pilots.samples.rows()) {
        throw DimensionError("channel column count must match the pilot antenna count");
    }
    ComplexMatrix received = multiply(channel, pilots.samples);
    for (std::size_t r = 0; r < received.rows(); ++r) {
        for (std::size_t c = 0; c < received.cols(); ++c) {
            received(r, c) += rng.noise();
        }
    }
    return received;
}

ComplexMatrix quantize(const ComplexMatrix& z) {
    ComplexMatrix out(z.rows(), z.cols());
    const cplx* in = z.data();
    cplx* q = out.data();
    for (std::size_t i = 0; i < z.size(); ++i) {
        q[i] = cplx{in[i].real() >= 0.0 ? 1.0 : -1.0, in[i].imag() >= 0.0 ? 1.0 : -1.0};
    }
    return out;
}

FeedbackFrame receiver_feedback(const ComplexMatrix& received, std::size_t rx_antennas,
                                std::size_t user) {
    if (received.rows() != rx_antennas) {
        throw DimensionError("received block must have one row per receive antenna");
    }
    const ComplexMatrix post = multiply(received.adjoint(), dft_unitary_cached(rx_antennas));
    FeedbackFrame frame;
    frame.user = user;
    frame.pilot_count = received.cols();
    frame.rx_antennas = rx_antennas;
    frame.payload = pack_bits(quantize(post));
    return frame;
}

std::size_t frame_payload_bytes(std::size_t pilot_count, std::size_t rx_antennas) {
    return (2 * pilot_count * rx_antennas + 7) / 8;
}

std::vector<std::uint8_t> pack_bits(const ComplexMatrix& signs) {
    std::vector<std::uint8_t> payload(frame_payload_bytes(signs.rows(), signs.cols()), 0);
    std::size_t bit = 0;
    for (std::size_t i = 0; i < signs.size(); ++i) {
        const cplx v = signs.data()[i];
        const bool re_pos = v.real() == 1.0;
        const bool im_pos = v.imag() == 1.0;
        if ((!re_pos && v.real() != -1.0) || (!im_pos && v.imag() != -1.0)) {
            throw EncodingError("pack_bits requires entries in {+-1 +- j}");
        }
        if (re_pos) payload[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
        ++bit;
        if (im_pos) payload[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
        ++bit;
    }
    return payload;
}

ComplexMatrix unpack_bits(const std::vector<std::uint8_t>& payload, std::size_t pilot_count,
                          std::size_t rx_antennas) {
    const std::size_t expected = frame_payload_bytes(pilot_count, rx_antennas);
    if (payload.size() != expected) {
        throw EncodingError("frame payload is " + std::to_string(payload.size()) +
                            " bytes, expected " + std::to_string(expected));
    }
    ComplexMatrix signs(pilot_count, rx_antennas);
    std::size_t bit = 0;
    for (std::size_t i = 0; i < signs.size(); ++i) {
        const bool re_pos = (payload[bit >> 3] >> (bit & 7)) & 1u;
        ++bit;
        const bool im_pos = (payload[bit >> 3] >> (bit & 7)) & 1u;
        ++bit;
        signs.data()[i] = cplx{re_pos ? 1.0 : -1.0, im_pos ? 1.0 : -1.0};
    }
    return signs;
}

ComplexMatrix unpack_frame(const FeedbackFrame& frame) {
    return unpack_bits(frame.payload, frame.pilot_count, frame.rx_antennas);
}

}  // namespace csit
