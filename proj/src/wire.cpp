// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#include "skincal/wire.hpp"

#include <cctype>

#include "skincal/errors.hpp"

namespace skincal::wire {

namespace {

constexpr std::uint16_t kIdBase = 0x200;
constexpr double kFullScaleKpa = 300.0;
constexpr double kRegulatorVolts = 10.0;
constexpr double kAmplifierRatio = 3.0;
constexpr double kAdcMaxVolts = 3.334;
constexpr std::uint32_t kMaxMillikpa = 300000;

}  // namespace

std::array<SkinFrame, 2> encode_module(int module_id, std::span<const std::uint8_t, 10> taxels,
                                       std::span<const std::uint8_t, 2> temps, std::uint8_t seq) {
  if (module_id < 0 || module_id > 127) {
    throw ModuleIdRange("module id " + std::to_string(module_id) + " outside [0, 127]");
  }
  const auto id = static_cast<std::uint16_t>(kIdBase | module_id);
  const std::uint8_t seq7 = seq & 0x7F;

  SkinFrame f0;
  f0.can_id = id;
  f0.payload[0] = seq7;  // frame index 0
  for (int i = 0; i < 7; ++i) f0.payload[1 + i] = taxels[i];

  SkinFrame f1;
  f1.can_id = id;
  f1.payload[0] = static_cast<std::uint8_t>(0x80 | seq7);  // frame index 1
  for (int i = 0; i < 3; ++i) f1.payload[1 + i] = taxels[7 + i];
  f1.payload[4] = temps[0];
  f1.payload[5] = temps[1];
  f1.payload[6] = 0x00;
  f1.payload[7] = 0x00;
  return {f0, f1};
}

DecodedModule decode_module(const SkinFrame& frame0, const SkinFrame& frame1) {
  if ((frame0.can_id & ~0x7F) != kIdBase || (frame1.can_id & ~0x7F) != kIdBase) {
    throw IdMismatch("frame id outside the skin id block");
  }
  if (frame0.can_id != frame1.can_id) throw IdMismatch("frames from different modules");
  const bool idx0 = (frame0.payload[0] & 0x80) != 0;
  const bool idx1 = (frame1.payload[0] & 0x80) != 0;
  if (idx0 || !idx1) throw IndexOrder("expected frame index 0 then 1");
  const std::uint8_t seq0 = frame0.payload[0] & 0x7F;
  const std::uint8_t seq1 = frame1.payload[0] & 0x7F;
  if (seq0 != seq1) throw SeqMismatch("frame pair sequence counters differ");

  DecodedModule out;
  out.module_id = frame0.can_id & 0x7F;
  out.seq = seq0;
  for (int i = 0; i < 7; ++i) out.taxel_counts[i] = frame0.payload[1 + i];
  for (int i = 0; i < 3; ++i) out.taxel_counts[7 + i] = frame1.payload[1 + i];
  out.temps[0] = frame1.payload[4];
  out.temps[1] = frame1.payload[5];
  return out;
}

double pressure_to_dac_volts(double kpa) {
  if (!(kpa >= 0.0 && kpa <= kFullScaleKpa)) {
    throw RangeExceeded("pressure outside [0, 300] kPa");
  }
  const double regulator_volts = kpa * (kRegulatorVolts / kFullScaleKpa);
  return regulator_volts / kAmplifierRatio;
}

double adc_volts_to_pressure(double volts) {
  if (!(volts >= 0.0 && volts <= kAdcMaxVolts)) {
    throw RangeExceeded("ADC voltage outside [0, 3.334] V");
  }
  return volts * kAmplifierRatio * (kFullScaleKpa / kRegulatorVolts);
}

std::string encode_regulator(const RegulatorMsg& msg) {
  if (msg.pressure_millikpa > kMaxMillikpa) {
    throw RangeExceeded("regulator pressure above 300000 millikPa");
  }
  std::string s = msg.kind == RegulatorMsgKind::kSet ? "SET " : "ACT ";
  s += std::to_string(msg.pressure_millikpa);
  s += '\n';
  return s;
}

RegulatorMsg decode_regulator(std::string_view line) {
  RegulatorMsg msg;
  if (line.size() < 6 || line.back() != '\n') throw Malformed("regulator line not terminated");
  if (line.starts_with("SET ")) {
    msg.kind = RegulatorMsgKind::kSet;
  } else if (line.starts_with("ACT ")) {
    msg.kind = RegulatorMsgKind::kActual;
  } else {
    throw Malformed("unknown regulator verb");
  }
  const std::string_view digits = line.substr(4, line.size() - 5);
  if (digits.empty() || digits.size() > 9) throw Malformed("bad regulator value field");
  std::uint64_t value = 0;
  for (char ch : digits) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw Malformed("regulator value is not a non-negative integer");
    }
    value = value * 10 + static_cast<std::uint64_t>(ch - '0');
  }
  if (value > kMaxMillikpa) throw RangeExceeded("regulator pressure above 300000 millikPa");
  msg.pressure_millikpa = static_cast<std::uint32_t>(value);
  return msg;
}

}  // namespace skincal::wire
