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

#include "xfed/wire.hpp"

#include <algorithm>
#include <stdexcept>

#include "xfed/decimal.hpp"
#include "xfed/xtree.hpp"

namespace xfed::wire {

namespace {

constexpr std::uint8_t kRecordStart = 0xB1;
constexpr std::uint8_t kRecordEnd = 0xB0;
constexpr std::uint16_t kEventsDone = 0xFFFF;

void put8(Bytes& b, std::uint8_t v) { b.push_back(v); }
void put16(Bytes& b, std::uint16_t v) {
  b.push_back((std::uint8_t)(v >> 8));
  b.push_back((std::uint8_t)v);
}
void put32(Bytes& b, std::uint32_t v) {
  b.push_back((std::uint8_t)(v >> 24));
  b.push_back((std::uint8_t)(v >> 16));
  b.push_back((std::uint8_t)(v >> 8));
  b.push_back((std::uint8_t)v);
}
void put_text(Bytes& b, const std::string& s) {
  b.insert(b.end(), s.begin(), s.end());
}

}  // namespace

// ---------------------------------------------------------------------------
// Encoder

Encoder::Encoder(XRelationSchema schema) : schema_(std::move(schema)) {
  // Dictionary ids follow the guide's sorted order; 0xFFFF is reserved as
  // the event list terminator, so one short of the 16 bit space.
  if (!schema_.guide) throw StreamError("wire: schema has no dataguide");
  if (schema_.guide->size() > 0xFFFF)
    throw StreamError("wire: dictionary overflow");
  dict_.assign(schema_.guide->begin(), schema_.guide->end());
  for (const Path& a : schema_.attributes) attr_ids_.push_back(path_id(a));

  header_.insert(header_.end(), {'X', 'T', 'W', '1'});
  put16(header_, (std::uint16_t)dict_.size());
  for (const Path& p : dict_) {
    put16(header_, (std::uint16_t)p.text().size());
    put_text(header_, p.text());
  }
  put16(header_, (std::uint16_t)attr_ids_.size());
  for (std::uint16_t id : attr_ids_) put16(header_, id);
}

std::uint16_t Encoder::path_id(const Path& p) const {
  auto it = std::lower_bound(dict_.begin(), dict_.end(), p);
  if (it == dict_.end() || !(*it == p))
    throw StreamError("wire: path not in dictionary: " + p.text());
  return (std::uint16_t)(it - dict_.begin());
}

Bytes Encoder::record(const XTuple& t) const {
  Bytes out;
  put8(out, kRecordStart);

  // Forest-wide preorder ordinals. Merged trees can hold arena ids out of
  // document order, so ordinals come from an explicit preorder numbering;
  // the decoder's trees are built in document order, where id == position.
  std::vector<std::vector<std::uint32_t>> ord(t.forest.size());
  {
    std::uint32_t n = 0;
    for (std::size_t i = 0; i < t.forest.size(); ++i) {
      ord[i].resize(t.forest[i]->node_count());
      for (NodeId id : t.forest[i]->preorder()) ord[i][id] = n++;
    }
  }

  // Mirror of the decoder's spine: (tree index here, node id) per depth.
  std::vector<std::pair<std::uint32_t, NodeId>> spine;
  auto spine_label = [&](std::size_t d) -> const std::string& {
    return t.forest[spine[d].first]->node(spine[d].second).label;
  };

  for (std::uint32_t ti = 0; ti < t.forest.size(); ++ti) {
    const XTree& tree = *t.forest[ti];
    for (NodeId id : tree.preorder()) {
      const XTree::Node& nd = tree.node(id);
      if (!nd.children.empty()) {
        if (!nd.text.empty())
          throw StreamError("wire: interior node with text");
        continue;  // created implicitly by its descendants' events
      }
      std::vector<NodeId> anc;  // root .. id
      for (NodeId a = id; a != kNoNode; a = tree.node(a).parent)
        anc.push_back(a);
      std::reverse(anc.begin(), anc.end());
      const std::size_t k = anc.size() - 1;

      // First ancestor depth where the decoder's spine diverges.
      std::size_t j = 0;
      while (j < k && j < spine.size() && spine[j].first == ti &&
             spine[j].second == anc[j])
        ++j;
      if (j < k) {
        if (j < spine.size() && spine_label(j) == tree.node(anc[j]).label) {
          // Same label, different instance: force a fresh one, or the
          // decoder would attach into the old subtree.
          put16(out, path_id(tree.path_of(anc[j])));
          put8(out, 0x00);
        }
        spine.resize(j);
        for (std::size_t d = j; d <= k - 1; ++d) spine.push_back({ti, anc[d]});
      } else {
        spine.resize(k);
      }
      spine.push_back({ti, id});

      put16(out, path_id(tree.path_of(id)));
      bool dec = false;
      if (auto d = Decimal::parse(nd.text)) dec = d->to_string() == nd.text;
      put8(out, dec ? 0x02 : 0x01);
      put32(out, (std::uint32_t)nd.text.size());
      put_text(out, nd.text);
    }
  }
  put16(out, kEventsDone);

  for (std::size_t a = 0; a < t.bindings.size(); ++a) {
    put16(out, (std::uint16_t)t.bindings[a].size());
    for (const NodeRef& r : t.bindings[a]) {
      put16(out, attr_ids_[a]);
      put32(out, ord[r.tree][r.node]);
    }
  }
  put8(out, kRecordEnd);
  return out;
}

// ---------------------------------------------------------------------------
// Decoder

namespace {

// Bounds-checked reader over the undecoded suffix. Short reads surface as
// nullopt so the caller can wait for more bytes.
struct Cursor {
  const Bytes& buf;
  std::size_t pos;

  std::optional<std::uint8_t> u8() {
    if (pos + 1 > buf.size()) return std::nullopt;
    return buf[pos++];
  }
  std::optional<std::uint16_t> u16() {
    if (pos + 2 > buf.size()) return std::nullopt;
    std::uint16_t v = (std::uint16_t)((buf[pos] << 8) | buf[pos + 1]);
    pos += 2;
    return v;
  }
  std::optional<std::uint32_t> u32() {
    if (pos + 4 > buf.size()) return std::nullopt;
    std::uint32_t v = ((std::uint32_t)buf[pos] << 24) |
                      ((std::uint32_t)buf[pos + 1] << 16) |
                      ((std::uint32_t)buf[pos + 2] << 8) | buf[pos + 3];
    pos += 4;
    return v;
  }
  std::optional<std::string> text(std::size_t n) {
    if (pos + n > buf.size()) return std::nullopt;
    std::string s((const char*)buf.data() + pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

void Decoder::feed(const std::uint8_t* data, std::size_t n) {
  // Drop the consumed prefix once it dominates the buffer.
  if (pos_ > 4096 && pos_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + (long)pos_);
    pos_ = 0;
  }
  buf_.insert(buf_.end(), data, data + n);
}

bool Decoder::parse_header() {
  Cursor c{buf_, pos_};
  auto magic = c.text(4);
  if (!magic) return false;
  if (*magic != "XTW1") throw StreamError("wire: bad magic");
  auto count = c.u16();
  if (!count) return false;
  std::vector<Path> dict;
  dict.reserve(*count);
  for (std::uint16_t i = 0; i < *count; ++i) {
    auto len = c.u16();
    if (!len) return false;
    auto text = c.text(*len);
    if (!text) return false;
    try {
      dict.push_back(Path::parse(*text));
    } catch (const std::invalid_argument& e) {
      throw StreamError(std::string("wire: bad dictionary path: ") + e.what());
    }
  }
  auto nattr = c.u16();
  if (!nattr) return false;
  std::vector<Path> attrs;
  for (std::uint16_t i = 0; i < *nattr; ++i) {
    auto id = c.u16();
    if (!id) return false;
    if (*id >= dict.size()) throw StreamError("wire: bad attribute path id");
    attrs.push_back(dict[*id]);
  }
  dict_ = std::move(dict);
  schema_.attributes = std::move(attrs);
  schema_.guide = make_guide(dict_);
  header_ready_ = true;
  pos_ = c.pos;
  return true;
}

std::optional<XTuple> Decoder::next() {
  auto incomplete = [&]() -> std::optional<XTuple> {
    if (finished_) throw StreamError("wire: truncated record");
    return std::nullopt;
  };

  if (!header_ready_) {
    if (!parse_header()) {
      if (finished_) throw StreamError("wire: truncated header");
      return std::nullopt;
    }
  }

  if (pos_ == buf_.size()) {
    return std::nullopt;  // clean end between records
  }

  Cursor c{buf_, pos_};
  auto marker = c.u8();
  if (!marker) return incomplete();
  if (*marker != kRecordStart) throw StreamError("wire: bad record marker");

  std::vector<std::shared_ptr<XTree>> forest;
  std::vector<NodeId> spine;  // node ids in the tree under construction

  for (;;) {
    auto id = c.u16();
    if (!id) return incomplete();
    if (*id == kEventsDone) break;
    if (*id >= dict_.size()) throw StreamError("wire: unknown path id");
    auto tag = c.u8();
    if (!tag) return incomplete();
    std::string payload;
    if (*tag == 0x01 || *tag == 0x02) {
      auto len = c.u32();
      if (!len) return incomplete();
      auto text = c.text(*len);
      if (!text) return incomplete();
      payload = std::move(*text);
      if (*tag == 0x02) {
        auto d = Decimal::parse(payload);
        if (!d || d->to_string() != payload)
          throw StreamError("wire: non canonical decimal payload");
      }
    } else if (*tag != 0x00) {
      throw StreamError("wire: unknown type tag");
    }

    const Path& p = dict_[*id];
    const auto& steps = p.steps();
    const std::size_t k = steps.size() - 1;
    bool fresh = forest.empty() || k == 0 ||
                 forest.back()->root_label() != steps[0];
    std::size_t m;  // depth below which the spine is reused
    if (fresh) {
      forest.push_back(std::make_shared<XTree>(steps[0]));
      spine.assign({forest.back()->root()});
      m = 1;
    } else {
      m = 1;
      const XTree& t = *forest.back();
      while (m < spine.size() && m < k && t.node(spine[m]).label == steps[m])
        ++m;
      spine.resize(m);
    }
    XTree& t = *forest.back();
    for (std::size_t d = m; d <= k; ++d) {
      if (!t.node(spine[d - 1]).text.empty())
        throw StreamError("wire: text node given children");
      spine.push_back(t.add_child(spine[d - 1], steps[d]));
    }
    if (*tag != 0x00 && !payload.empty()) t.set_text(spine[k], payload);
  }

  std::vector<std::uint32_t> tree_base(forest.size(), 0);
  std::uint32_t total = 0;
  for (std::size_t i = 0; i < forest.size(); ++i) {
    tree_base[i] = total;
    total += (std::uint32_t)forest[i]->node_count();
  }

  XTuple out;
  for (const auto& tr : forest) out.forest.push_back(tr);
  out.bindings.resize(schema_.attributes.size());
  for (std::size_t a = 0; a < schema_.attributes.size(); ++a) {
    auto count = c.u16();
    if (!count) return incomplete();
    for (std::uint16_t i = 0; i < *count; ++i) {
      auto pid = c.u16();
      if (!pid) return incomplete();
      auto ord = c.u32();
      if (!ord) return incomplete();
      if (*pid >= dict_.size()) throw StreamError("wire: unknown path id");
      if (*ord >= total) throw StreamError("wire: ref ordinal out of range");
      std::uint32_t ti =
          (std::uint32_t)(std::upper_bound(tree_base.begin(), tree_base.end(),
                                           *ord) -
                          tree_base.begin()) -
          1;
      NodeRef ref{ti, *ord - tree_base[ti]};
      if (!(out.forest[ref.tree]->path_of(ref.node) == dict_[*pid]))
        throw StreamError("wire: binding path mismatch");
      out.bindings[a].push_back(ref);
    }
  }
  auto end = c.u8();
  if (!end) return incomplete();
  if (*end != kRecordEnd) throw StreamError("wire: bad record end");

  pos_ = c.pos;
  return out;
}

// ---------------------------------------------------------------------------
// Conveniences

Bytes encode(const XRelation& rel) {
  Encoder e(rel.schema);
  Bytes out = e.header();
  for (const XTuple& t : rel.tuples) {
    Bytes r = e.record(t);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

XRelation decode(const Bytes& bytes) {
  Decoder d;
  d.feed(bytes);
  d.finish();
  XRelation rel;
  while (auto t = d.next()) rel.tuples.push_back(std::move(*t));
  rel.schema = d.schema();
  rel.ordered = true;
  return rel;
}

}  // namespace xfed::wire
