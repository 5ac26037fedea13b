// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace skincal::wire {

/// One CAN-style frame of the skin link: 11-bit id 0x200|module_id, 8 payload
/// bytes. Payload byte 0 carries the frame index in bit 7 and a 7-bit
/// sequence counter in bits 6..0.
struct SkinFrame {
  std::uint16_t can_id = 0;
  std::array<std::uint8_t, 8> payload{};

  bool operator==(const SkinFrame&) const = default;
};

struct DecodedModule {
  int module_id = 0;
  std::array<std::uint8_t, 10> taxel_counts{};
  std::array<std::uint8_t, 2> temps{};
  std::uint8_t seq = 0;

  bool operator==(const DecodedModule&) const = default;
};

/// Packs one module (10 taxel bytes + 2 temperature bytes) into two frames
/// sharing a sequence counter. Frame 0 carries taxels 0..6, frame 1 carries
/// taxels 7..9 plus the temperatures. Throws ModuleIdRange.
std::array<SkinFrame, 2> encode_module(int module_id, std::span<const std::uint8_t, 10> taxels,
                                       std::span<const std::uint8_t, 2> temps, std::uint8_t seq);

/// Inverse of encode_module. Throws IdMismatch, IndexOrder, SeqMismatch.
DecodedModule decode_module(const SkinFrame& frame0, const SkinFrame& frame1);

// Regulator analog chain: 0..300 kPa maps linearly to 0..10 V at the
// regulator; the controller DAC drives it through a x3 amplifier and reads it
// back through a /3 divider.

/// DAC voltage commanding the given pressure. Throws RangeExceeded outside
/// [0, 300] kPa.
double pressure_to_dac_volts(double kpa);

/// Pressure indicated by the divider output at the ADC. Throws RangeExceeded
/// outside [0, 3.334] V.
double adc_volts_to_pressure(double volts);

/// Ideal analog elements, for closing the loop in tests.
inline double amplifier_3x(double volts) { return volts * 3.0; }
inline double divider_3x(double volts) { return volts / 3.0; }

enum class RegulatorMsgKind { kSet, kActual };

struct RegulatorMsg {
  RegulatorMsgKind kind = RegulatorMsgKind::kSet;
  std::uint32_t pressure_millikpa = 0;  // <= 300000

  bool operator==(const RegulatorMsg&) const = default;
};

/// ASCII line protocol: "SET <millikpa>\n" / "ACT <millikpa>\n".
std::string encode_regulator(const RegulatorMsg& msg);

/// Parses one line (terminating newline required). Throws Malformed on any
/// grammar violation, RangeExceeded above 300000 millikPa.
RegulatorMsg decode_regulator(std::string_view line);

}  // namespace skincal::wire
