// Copyright 2026 The SplitMix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "splitmix/bytes.h"

#include <bit>
#include <cstring>

#include "splitmix/error.h"

namespace splitmix {

void ByteWriter::U16(uint16_t v) {
  U8(static_cast<uint8_t>(v));
  U8(static_cast<uint8_t>(v >> 8));
}

void ByteWriter::U32(uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) U8(static_cast<uint8_t>(v >> shift));
}

void ByteWriter::U64(uint64_t v) {
  for (int shift = 0; shift < 64; shift += 8) U8(static_cast<uint8_t>(v >> shift));
}

void ByteWriter::F64(double v) { U64(std::bit_cast<uint64_t>(v)); }

void ByteWriter::Bytes(std::span<const uint8_t> bytes) {
  out_.insert(out_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::String(const std::string& s) {
  if (s.size() > UINT16_MAX) ThrowParameter("ByteWriter: string too long");
  U16(static_cast<uint16_t>(s.size()));
  Bytes(std::span(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

void ByteReader::Need(size_t n) const {
  if (remaining() < n) {
    ThrowProtocol("truncated payload: need " + std::to_string(n) +
                  " bytes, have " + std::to_string(remaining()));
  }
}

uint8_t ByteReader::U8() {
  Need(1);
  return in_[pos_++];
}

uint16_t ByteReader::U16() {
  Need(2);
  uint16_t v = static_cast<uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
  pos_ += 2;
  return v;
}

uint32_t ByteReader::U32() {
  Need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(in_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

uint64_t ByteReader::U64() {
  Need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(in_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

double ByteReader::F64() { return std::bit_cast<double>(U64()); }

std::span<const uint8_t> ByteReader::Bytes(size_t n) {
  Need(n);
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::String() {
  const uint16_t n = U16();
  auto raw = Bytes(n);
  return std::string(reinterpret_cast<const char*>(raw.data()), raw.size());
}

}  // namespace splitmix
