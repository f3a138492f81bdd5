#include <doctest.h>

#include <cmath>
#include <vector>

#include "csit/airlink.hpp"
#include "oracles.hpp"

using namespace csit;
using csit::testing::max_abs_diff;
using csit::testing::naive_adjoint;
using csit::testing::naive_multiply;

TEST_SUITE("airlink") {

TEST_CASE("scalar pilot design") {
    RandomSource rng(1);
    const PilotMatrix p = design_pilots(1, 1, 4.0, rng);
    const double v = p.samples(0, 0).real();
    CHECK((v == doctest::Approx(2.0) || v == doctest::Approx(-2.0)));
    CHECK(p.samples(0, 0).imag() == 0.0);
}

TEST_CASE("pilot columns meet the power budget with equality") {
    RandomSource rng(8);
    for (auto [m, t, power] : {std::tuple<std::size_t, std::size_t, double>{4, 8, 1.0},
                               {128, 64, std::pow(10.0, 1.5)}}) {
        const PilotMatrix p = design_pilots(m, t, power, rng);
        for (std::size_t col = 0; col < t; ++col) {
            double norm_sq = 0.0;
            for (std::size_t row = 0; row < m; ++row) norm_sq += std::norm(p.samples(row, col));
            CHECK(std::abs(norm_sq - power) < 1e-9);
        }
    }
    CHECK_THROWS_AS(design_pilots(4, 8, 0.0, rng), ConfigError);
    CHECK_THROWS_AS(design_pilots(0, 8, 1.0, rng), ConfigError);
}

TEST_CASE("effective sensing matrix equals the sign design") {
    RandomSource rng(12);
    const PilotMatrix p = design_pilots(4, 8, 1.0, rng);
    // X^H A_T recovers Z^H, so every entry is +-sqrt(P/M) = +-1/2 exactly.
    const ComplexMatrix sensing = naive_multiply(naive_adjoint(p.samples), dft_unitary(4));
    CHECK(max_abs_diff(sensing, naive_adjoint(p.angular_design)) < 1e-12);
    for (const cplx& v : sensing.entries()) {
        CHECK(std::abs(std::abs(v.real()) - 0.5) < 1e-12);
        CHECK(std::abs(v.imag()) < 1e-12);
    }
}

TEST_CASE("downlink_receive without noise is the plain product") {
    RandomSource rng(3);
    const PilotMatrix p = design_pilots(8, 5, 2.0, rng);
    ComplexMatrix h(2, 8);
    for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] = rng.gaussian();

    RandomSource muted(4);
    muted.mute_noise(true);
    CHECK(max_abs_diff(downlink_receive(h, p, muted), naive_multiply(h, p.samples)) < 1e-12);

    const ComplexMatrix zero(2, 8);
    CHECK(downlink_receive(zero, p, muted).is_zero());

    CHECK_THROWS_AS(downlink_receive(ComplexMatrix(2, 4), p, muted), DimensionError);
}

TEST_CASE("noise variance is one half per real dimension") {
    RandomSource rng(99);
    RandomSource pilot_rng(1);
    const PilotMatrix p = design_pilots(1, 12000, 1.0, pilot_rng);
    const ComplexMatrix y = downlink_receive(ComplexMatrix(2, 1), p, rng);  // H = 0
    double mean_re = 0.0, mean_im = 0.0;
    for (const cplx& v : y.entries()) {
        mean_re += v.real();
        mean_im += v.imag();
    }
    mean_re /= double(y.size());
    mean_im /= double(y.size());
    double var_re = 0.0, var_im = 0.0;
    for (const cplx& v : y.entries()) {
        var_re += (v.real() - mean_re) * (v.real() - mean_re);
        var_im += (v.imag() - mean_im) * (v.imag() - mean_im);
    }
    var_re /= double(y.size());
    var_im /= double(y.size());
    CHECK(std::abs(var_re - 0.5) < 0.02);
    CHECK(std::abs(var_im - 0.5) < 0.02);
}

TEST_CASE("quantizer keeps component signs with sign(0) = +1") {
    ComplexMatrix z(1, 2);
    z(0, 0) = cplx{0.3, -2.0};
    z(0, 1) = cplx{-1.0, 0.0};
    const ComplexMatrix q = quantize(z);
    CHECK(q(0, 0) == cplx{1.0, -1.0});
    CHECK(q(0, 1) == cplx{-1.0, 1.0});
    CHECK(max_abs_diff(quantize(q), q) == 0.0);  // idempotent on the alphabet
}

TEST_CASE("quantizer output alphabet on a grid including axis points") {
    const double grid[] = {-1.0, -0.5, -0.0, 0.0, 0.5, 1.0};
    for (double re : grid) {
        for (double im : grid) {
            ComplexMatrix z(1, 1);
            z(0, 0) = cplx{re, im};
            const cplx q = quantize(z)(0, 0);
            CHECK(std::abs(q.real()) == 1.0);
            CHECK(std::abs(q.imag()) == 1.0);
        }
    }
}

TEST_CASE("receiver_feedback equals the direct post-processing oracle") {
    RandomSource rng(6);
    ComplexMatrix y(2, 2);
    y(0, 0) = cplx{0.4, -0.2};
    y(0, 1) = cplx{-1.3, 0.8};
    y(1, 0) = cplx{0.1, 0.9};
    y(1, 1) = cplx{-0.6, -0.4};
    const FeedbackFrame frame = receiver_feedback(y, 2, 7);
    CHECK(frame.user == 7);
    CHECK(frame.bit_count() == 8);
    const ComplexMatrix expected = quantize(naive_multiply(naive_adjoint(y), dft_unitary(2)));
    CHECK(max_abs_diff(unpack_frame(frame), expected) == 0.0);

    // N = 1: the receive basis is the scalar 1.
    ComplexMatrix y1(1, 3);
    y1(0, 0) = cplx{0.5, -0.5};
    y1(0, 1) = cplx{-0.5, 0.5};
    y1(0, 2) = cplx{2.0, 2.0};
    const FeedbackFrame f1 = receiver_feedback(y1, 1);
    CHECK(max_abs_diff(unpack_frame(f1), quantize(naive_adjoint(y1))) == 0.0);

    CHECK_THROWS_AS(receiver_feedback(y, 3), DimensionError);
}

TEST_CASE("feedback payload carries exactly 2 T N bits") {
    RandomSource rng(31);
    ComplexMatrix y(2, 64);
    for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = rng.gaussian();
    const FeedbackFrame frame = receiver_feedback(y, 2);
    CHECK(frame.bit_count() == 256);
    CHECK(frame.payload.size() == 32);
    CHECK(frame_payload_bytes(64, 2) == 32);
    CHECK(frame_payload_bytes(1, 1) == 1);
    CHECK(frame_payload_bytes(3, 1) == 1);
    CHECK(frame_payload_bytes(5, 1) == 2);
}

TEST_CASE("wire format bit layout") {
    ComplexMatrix one(1, 1);
    one(0, 0) = cplx{1.0, 1.0};
    CHECK(pack_bits(one) == std::vector<std::uint8_t>{0x03});
    one(0, 0) = cplx{-1.0, -1.0};
    CHECK(pack_bits(one) == std::vector<std::uint8_t>{0x00});
    one(0, 0) = cplx{1.0, -1.0};
    CHECK(pack_bits(one) == std::vector<std::uint8_t>{0x01});

    one(0, 0) = cplx{0.5, 1.0};
    CHECK_THROWS_AS(pack_bits(one), EncodingError);
    CHECK_THROWS_AS(unpack_bits({0x00, 0x00}, 1, 1), EncodingError);
}

TEST_CASE("wire format round trip is the identity, exhaustively for 8 entries") {
    // T*N = 8: every one of the 4^8 sign matrices survives a round trip.
    for (unsigned pattern = 0; pattern < (1u << 16); ++pattern) {
        ComplexMatrix signs(4, 2);
        for (std::size_t e = 0; e < 8; ++e) {
            const bool re_pos = (pattern >> (2 * e)) & 1u;
            const bool im_pos = (pattern >> (2 * e + 1)) & 1u;
            signs.data()[e] = cplx{re_pos ? 1.0 : -1.0, im_pos ? 1.0 : -1.0};
        }
        if (max_abs_diff(unpack_bits(pack_bits(signs), 4, 2), signs) != 0.0) {
            FAIL("round trip mismatch for pattern ", pattern);
        }
    }
}

TEST_CASE("wire format round trip on random larger frames") {
    RandomSource rng(55);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t t = 1 + rng.uniform_index(24);
        const std::size_t n = 1 + rng.uniform_index(4);
        ComplexMatrix signs(t, n);
        for (std::size_t i = 0; i < signs.size(); ++i) {
            signs.data()[i] = cplx{rng.rademacher(), rng.rademacher()};
        }
        REQUIRE(max_abs_diff(unpack_bits(pack_bits(signs), t, n), signs) == 0.0);
    }
}

}  // TEST_SUITE
