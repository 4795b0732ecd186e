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

#ifndef SPLITMIX_BYTES_H_
#define SPLITMIX_BYTES_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace splitmix {

// Little-endian writer, independent of host byte order.
class ByteWriter {
 public:
  void U8(uint8_t v) { out_.push_back(v); }
  void U16(uint16_t v);
  void U32(uint32_t v);
  void U64(uint64_t v);
  void F64(double v);
  void Bytes(std::span<const uint8_t> bytes);
  void String(const std::string& s);  // u16 length prefix

  size_t size() const { return out_.size(); }
  std::vector<uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

// Throws a protocol error on truncated input.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> in) : in_(in) {}

  uint8_t U8();
  uint16_t U16();
  uint32_t U32();
  uint64_t U64();
  double F64();
  std::span<const uint8_t> Bytes(size_t n);
  std::string String();

  size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }

 private:
  void Need(size_t n) const;

  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

}  // namespace splitmix

#endif  // SPLITMIX_BYTES_H_
