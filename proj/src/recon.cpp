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

#include <algorithm>

#include "xfed/recon.hpp"

namespace xfed {

TemplateItemPtr TemplateItem::element(std::string tag,
                                      std::vector<TemplateItemPtr> kids) {
  auto it = std::make_shared<TemplateItem>();
  it->kind = Kind::Element;
  it->text = std::move(tag);
  it->children = std::move(kids);
  return it;
}

TemplateItemPtr TemplateItem::literal(std::string value) {
  auto it = std::make_shared<TemplateItem>();
  it->kind = Kind::Text;
  it->text = std::move(value);
  return it;
}

TemplateItemPtr TemplateItem::placeholder(Path p) {
  auto it = std::make_shared<TemplateItem>();
  it->kind = Kind::Placeholder;
  it->path = std::move(p);
  return it;
}

TemplateItemPtr TemplateItem::scope(int level,
                                    std::vector<TemplateItemPtr> kids) {
  auto it = std::make_shared<TemplateItem>();
  it->kind = Kind::Scope;
  it->level = level;
  it->children = std::move(kids);
  return it;
}

namespace {

void render_items(const std::vector<TemplateItemPtr>& items, std::string& out) {
  for (const TemplateItemPtr& it : items) {
    switch (it->kind) {
      case TemplateItem::Kind::Element:
        out += '<';
        out += it->text;
        out += '>';
        render_items(it->children, out);
        out += "</";
        out += it->text;
        out += '>';
        break;
      case TemplateItem::Kind::Text:
        out += it->text;
        break;
      case TemplateItem::Kind::Placeholder:
        out += '{';
        out += it->path.text();
        out += '}';
        break;
      case TemplateItem::Kind::Scope:
        render_items(it->children, out);
        break;
    }
  }
}

void collect_paths(const std::vector<TemplateItemPtr>& items,
                   std::vector<Path>& out) {
  for (const TemplateItemPtr& it : items) {
    if (it->kind == TemplateItem::Kind::Placeholder) {
      if (std::find(out.begin(), out.end(), it->path) == out.end())
        out.push_back(it->path);
    }
    collect_paths(it->children, out);
  }
}

}  // namespace

std::string ReconTemplate::render() const {
  std::string out;
  render_items(items, out);
  return out;
}

std::vector<Path> ReconTemplate::placeholder_paths() const {
  std::vector<Path> out;
  collect_paths(items, out);
  return out;
}

// ---------------------------------------------------------------------------
// ReconstructEventStream

namespace {

// Slice of each attribute's ref list visible at the current scope depth.
struct ScopeCtx {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges;  // per position
  const NestShape* shape = nullptr;  // members one level deeper, if any
};

void emit_subtree(const XTree& t, NodeId id, std::vector<Event>& buf) {
  buf.push_back(Event::open(t.node(id).label));
  if (t.node(id).children.empty()) {
    if (!t.node(id).text.empty()) buf.push_back(Event::text(t.node(id).text));
  } else {
    for (NodeId c : t.node(id).children) emit_subtree(t, c, buf);
  }
  buf.push_back(Event::close());
}

// Node content: leaf text, or the serialized children of an interior node.
void emit_content(const XTuple& t, const NodeRef& r, std::vector<Event>& buf) {
  const XTree& tree = *t.forest[r.tree];
  if (tree.node(r.node).children.empty()) {
    if (!tree.node(r.node).text.empty())
      buf.push_back(Event::text(tree.node(r.node).text));
    return;
  }
  for (NodeId c : tree.node(r.node).children) emit_subtree(tree, c, buf);
}

}  // namespace

ReconstructEventStream::ReconstructEventStream(TupleStreamPtr child,
                                               ReconTemplate tpl)
    : child_(std::move(child)), tpl_(std::move(tpl)) {
  if (tpl_.forest_mode) return;
  const auto& attrs = child_->schema().attributes;
  for (const Path& p : tpl_.placeholder_paths())
    if (std::find(attrs.begin(), attrs.end(), p) == attrs.end())
      throw PlanError("x_reconstruct: unknown attribute " + p.text());
}

void ReconstructEventStream::instantiate(const XTuple& t) {
  if (tpl_.forest_mode) {
    for (const XTreePtr& tree : t.forest) emit_subtree(*tree, 0, buf_);
    buf_.push_back(Event::boundary());
    return;
  }

  const auto& attrs = child_->schema().attributes;
  auto pos_of = [&](const Path& p) {
    return (std::size_t)(std::find(attrs.begin(), attrs.end(), p) -
                         attrs.begin());
  };

  ScopeCtx base;
  base.ranges.reserve(attrs.size());
  for (std::size_t i = 0; i < attrs.size(); ++i)
    base.ranges.push_back({0, (std::uint32_t)t.bindings[i].size()});
  base.shape = t.shape.get();

  // Refs of a placeholder inside the current scope slice.
  auto refs_in = [&](const ScopeCtx& ctx, const Path& p) {
    std::vector<NodeRef> out;
    std::size_t pos = pos_of(p);
    auto [b, e] = pos < ctx.ranges.size()
                      ? ctx.ranges[pos]
                      : std::pair<std::uint32_t, std::uint32_t>{
                            0, (std::uint32_t)t.bindings[pos].size()};
    e = std::min<std::uint32_t>(e, (std::uint32_t)t.bindings[pos].size());
    for (std::uint32_t i = b; i < e; ++i) out.push_back(t.bindings[pos][i]);
    return out;
  };

  std::function<void(const std::vector<TemplateItemPtr>&, const ScopeCtx&)>
      emit_items = [&](const std::vector<TemplateItemPtr>& items,
                       const ScopeCtx& ctx) {
        for (const TemplateItemPtr& it : items) {
          switch (it->kind) {
            case TemplateItem::Kind::Text:
              if (!it->text.empty()) buf_.push_back(Event::text(it->text));
              break;
            case TemplateItem::Kind::Placeholder:
              for (const NodeRef& r : refs_in(ctx, it->path))
                emit_content(t, r, buf_);
              break;
            case TemplateItem::Kind::Element: {
              // A wrapper holding exactly one placeholder repeats per ref
              // and vanishes when nothing is bound.
              if (it->children.size() == 1 &&
                  it->children[0]->kind == TemplateItem::Kind::Placeholder) {
                for (const NodeRef& r :
                     refs_in(ctx, it->children[0]->path)) {
                  buf_.push_back(Event::open(it->text));
                  emit_content(t, r, buf_);
                  buf_.push_back(Event::close());
                }
                break;
              }
              buf_.push_back(Event::open(it->text));
              emit_items(it->children, ctx);
              buf_.push_back(Event::close());
              break;
            }
            case TemplateItem::Kind::Scope: {
              if (ctx.shape) {
                for (const NestShape::Member& m : ctx.shape->members) {
                  ScopeCtx inner;
                  inner.ranges = m.ranges;
                  inner.shape = m.child.get();
                  emit_items(it->children, inner);
                }
              } else {
                // Ungrouped input: one implicit member spanning the slice.
                emit_items(it->children, ctx);
              }
              break;
            }
          }
        }
      };

  emit_items(tpl_.items, base);
  buf_.push_back(Event::boundary());
}

Event ReconstructEventStream::next() {
  for (;;) {
    if (buf_pos_ < buf_.size()) return buf_[buf_pos_++];
    if (done_) return Event::end();
    buf_.clear();
    buf_pos_ = 0;
    auto t = child_->next();
    if (!t) {
      done_ = true;
      return Event::end();
    }
    instantiate(*t);
  }
}

std::vector<std::string> x_reconstruct(const XRelation& r,
                                       const ReconTemplate& tpl) {
  ReconstructEventStream s(std::make_unique<VectorTupleStream>(r), tpl);
  return drain_documents(s);
}

std::vector<std::string> drain_documents(EventStream& s) {
  std::vector<std::string> docs;
  std::string cur;
  std::vector<std::string> open;
  for (;;) {
    Event e = s.next();
    switch (e.kind) {
      case Event::Kind::Open:
        cur += '<';
        cur += e.data;
        cur += '>';
        open.push_back(std::move(e.data));
        break;
      case Event::Kind::Text:
        append_escaped(e.data, cur);
        break;
      case Event::Kind::Close:
        if (open.empty()) throw StreamError("drain: unbalanced close");
        cur += "</";
        cur += open.back();
        cur += '>';
        open.pop_back();
        break;
      case Event::Kind::Boundary:
        if (!open.empty()) throw StreamError("drain: boundary inside element");
        docs.push_back(std::move(cur));
        cur.clear();
        break;
      case Event::Kind::End:
        if (!open.empty()) throw StreamError("drain: truncated document");
        if (!cur.empty()) docs.push_back(std::move(cur));
        return docs;
      case Event::Kind::Error:
        throw StreamError(e.data);
    }
  }
}

}  // namespace xfed
