// Copyright 2026 The xfed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef XFED_WIRE_HPP_
#define XFED_WIRE_HPP_

// Compact binary encoding for XTuple relations, used on the network path
// between adapters and mediators and for on-disk relation caching.
//
// Frame layout (all integers big-endian):
//   magic "XTW1"
//   dictionary: count u16, then per path: length u16 + UTF-8 text
//   schema attribute list: count u16, then one path-id u16 per attribute
//   records: each
//     0xB1
//     events: path-id u16 + tag u8
//       0x00 interior node, no payload (opens a fresh instance of the path)
//       0x01 string leaf:  u32 length + UTF-8
//       0x02 decimal leaf: u32 length + canonical decimal text
//     path-id 0xFFFF ends the event list
//     bindings, one list per schema attribute:
//       count u16, then per ref: path-id u16 + node ordinal u32
//       (ordinals number the record's nodes in forest preorder)
//     0xB0
//
// A record is self-delimiting, so the decoder surfaces each tuple as soon
// as its record is complete regardless of how the bytes were chunked.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xtuple.hpp"

namespace xfed::wire {

using Bytes = std::vector<std::uint8_t>;

// Streaming encoder: header once, then one record per tuple.
class Encoder {
 public:
  explicit Encoder(XRelationSchema schema);

  const Bytes& header() const { return header_; }
  Bytes record(const XTuple& t) const;

 private:
  XRelationSchema schema_;
  std::vector<Path> dict_;          // id -> path
  std::vector<std::uint16_t> attr_ids_;
  Bytes header_;

  std::uint16_t path_id(const Path& p) const;
};

// Incremental decoder. feed() accepts arbitrary chunking; next() yields a
// tuple per completed record and std::nullopt when more bytes are needed.
// finish() declares end of input; a partial record after it is an error.
// Malformed input throws StreamError; tuples decoded before the bad bytes
// have already been delivered.
class Decoder {
 public:
  void feed(const std::uint8_t* data, std::size_t n);
  void feed(const Bytes& b) { feed(b.data(), b.size()); }
  void finish() { finished_ = true; }

  std::optional<XTuple> next();

  bool header_ready() const { return header_ready_; }
  const XRelationSchema& schema() const { return schema_; }

 private:
  Bytes buf_;
  std::size_t pos_ = 0;  // consumed prefix of buf_
  bool finished_ = false;
  bool header_ready_ = false;
  XRelationSchema schema_;
  std::vector<Path> dict_;

  bool parse_header();
};

// Whole-relation conveniences.
Bytes encode(const XRelation& rel);
XRelation decode(const Bytes& bytes);

}  // namespace xfed::wire

#endif  // XFED_WIRE_HPP_
