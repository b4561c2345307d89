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

#include "xfed/catalog.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include "xfed/xml.hpp"

namespace xfed {

namespace {

constexpr std::size_t kMaxJokerExpansions = 32;

[[noreturn]] void bad(const std::string& what) {
  throw StreamError("catalog: " + what);
}

const XTree::Node* child_named(const XTree& t, NodeId parent,
                               const std::string& label, NodeId* id = nullptr) {
  for (NodeId c : t.node(parent).children)
    if (t.node(c).label == label) {
      if (id) *id = c;
      return &t.node(c);
    }
  return nullptr;
}

}  // namespace

const char* capability_name(Capability c) {
  switch (c) {
    case Capability::QueryLanguage: return "query-language";
    case Capability::Tabular: return "tabular";
    case Capability::XmlFile: return "xml-file";
  }
  return "?";
}

std::optional<Capability> capability_from(std::string_view name) {
  if (name == "query-language") return Capability::QueryLanguage;
  if (name == "tabular") return Capability::Tabular;
  if (name == "xml-file") return Capability::XmlFile;
  return std::nullopt;
}

SourceDescriptor parse_descriptor(const std::string& xml_text,
                                  DiagnosticsPtr diag) {
  std::vector<XTreePtr> docs = parse_document(xml_text);
  if (docs.size() != 1 || docs[0]->root_label() != "source")
    bad("descriptor must be a single <source> document");
  const XTree& t = *docs[0];

  SourceDescriptor d;
  const XTree::Node* id = child_named(t, t.root(), "id");
  if (!id || id->text.empty()) bad("descriptor without <id>");
  d.id = id->text;
  const XTree::Node* cap = child_named(t, t.root(), "capability");
  if (!cap) bad("descriptor without <capability>");
  auto c = capability_from(cap->text);
  if (!c) bad("unknown capability '" + cap->text + "'");
  d.capability = *c;
  if (const XTree::Node* tr = child_named(t, t.root(), "transport"))
    d.transport = tr->text;

  for (NodeId cid : t.node(t.root()).children) {
    if (t.node(cid).label != "collection") continue;
    CollectionMetadata m;
    const XTree::Node* name = child_named(t, cid, "name");
    if (!name || name->text.empty()) bad("collection without <name>");
    m.name = name->text;
    if (const XTree::Node* card = child_named(t, cid, "cardinality")) {
      try {
        m.cardinality = std::stoull(card->text);
      } catch (const std::exception&) {
        bad("bad cardinality '" + card->text + "'");
      }
    }
    std::vector<Path> raw;
    for (NodeId pid : t.node(cid).children)
      if (t.node(pid).label == "path") {
        try {
          raw.push_back(Path::parse(t.node(pid).text));
        } catch (const std::invalid_argument& e) {
          bad(std::string("bad path: ") + e.what());
        }
      }
    if (raw.empty()) bad("collection '" + m.name + "' without paths");
    for (const Path& p : raw)
      if (p.root() != raw[0].root())
        bad("collection '" + m.name + "' mixes root steps");
    Dataguide as_given(raw.begin(), raw.end());
    if (!guide_is_prefix_closed(as_given) && diag)
      diag->warn("catalog: dataguide of '" + m.name +
                 "' was not prefix closed; closing it");
    m.guide = make_guide(raw);
    for (const CollectionMetadata& prev : d.collections)
      if (prev.name == m.name) bad("duplicate collection '" + m.name + "'");
    d.collections.push_back(std::move(m));
  }
  return d;
}

std::string descriptor_to_xml(const SourceDescriptor& d) {
  std::string out = "<source><id>";
  append_escaped(d.id, out);
  out += "</id><capability>";
  out += capability_name(d.capability);
  out += "</capability>";
  if (!d.transport.empty()) {
    out += "<transport>";
    append_escaped(d.transport, out);
    out += "</transport>";
  }
  for (const CollectionMetadata& m : d.collections) {
    out += "<collection><name>";
    append_escaped(m.name, out);
    out += "</name><cardinality>" + std::to_string(m.cardinality) +
           "</cardinality>";
    for (const Path& p : *m.guide) {
      out += "<path>";
      append_escaped(p.text(), out);
      out += "</path>";
    }
    out += "</collection>";
  }
  out += "</source>";
  return out;
}

DataguidePtr infer_default_guide(const std::vector<std::string>& samples) {
  std::vector<Path> paths;
  for (const std::string& s : samples)
    for (const XTreePtr& t : parse_document(s))
      for (NodeId id : t->preorder()) paths.push_back(t->path_of(id));
  return make_guide(paths);
}

void Catalog::register_source(SourceDescriptor d) {
  if (d.id.empty()) bad("source without id");
  for (const CollectionMetadata& m : d.collections) {
    if (!m.guide || m.guide->empty())
      bad("collection '" + m.name + "' without a dataguide");
    if (!guide_is_prefix_closed(*m.guide))
      bad("collection '" + m.name + "' guide is not prefix closed");
  }
  std::unique_lock lock(mu_);
  sources_[d.id] = std::move(d);
}

void Catalog::register_source_xml(const std::string& xml_text,
                                  DiagnosticsPtr diag) {
  register_source(parse_descriptor(xml_text, std::move(diag)));
}

namespace {

bool joker_match(const Path& pattern, const Path& candidate) {
  if (pattern.size() != candidate.size()) return false;
  for (std::size_t i = 0; i < pattern.size(); ++i)
    if (pattern.steps()[i] != "*" &&
        pattern.steps()[i] != candidate.steps()[i])
      return false;
  return true;
}

bool has_joker(const Path& p) {
  for (const std::string& s : p.steps())
    if (s == "*") return true;
  return false;
}

}  // namespace

std::vector<CollectionHit> Catalog::lookup(
    const std::string& pattern, const std::vector<Path>& required) const {
  std::shared_lock lock(mu_);
  std::vector<CollectionHit> hits;
  for (const auto& [id, src] : sources_) {
    for (const CollectionMetadata& m : src.collections) {
      if (pattern != "*" && pattern != m.name) continue;
      CollectionHit hit;
      hit.source_id = id;
      hit.collection = m.name;
      hit.capability = src.capability;
      hit.transport = src.transport;
      hit.cardinality = m.cardinality;
      bool covered = true;
      for (const Path& p : required) {
        PathExpansion ex;
        ex.required = p;
        if (!has_joker(p)) {
          if (m.guide->count(p)) ex.expansions.push_back(p);
        } else {
          for (const Path& g : *m.guide)
            if (joker_match(p, g)) ex.expansions.push_back(g);
          if (ex.expansions.size() > kMaxJokerExpansions)
            throw PlanError("catalog: joker " + p.text() + " expands to " +
                            std::to_string(ex.expansions.size()) +
                            " paths in '" + m.name + "'");
        }
        if (ex.expansions.empty()) {
          covered = false;
          break;
        }
        hit.paths.push_back(std::move(ex));
      }
      if (covered) hits.push_back(std::move(hit));
    }
  }
  return hits;
}

std::optional<SourceDescriptor> Catalog::source(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = sources_.find(id);
  if (it == sources_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Catalog::source_ids() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sources_) out.push_back(id);
  return out;
}

}  // namespace xfed
