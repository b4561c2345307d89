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

#include "xfed/adapters.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "xfed/xml.hpp"
#include "xfed/xtree.hpp"
#include "xfed/xtuple.hpp"

namespace xfed {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

Path join_path(const std::vector<std::string>& root,
               const std::vector<std::string>& rel) {
  std::vector<std::string> steps = root;
  steps.insert(steps.end(), rel.begin(), rel.end());
  std::string text;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) text += '/';
    text += steps[i];
  }
  return Path::parse(text);
}

bool is_slot_atom(const frontend::Atom& a) {
  return a.kind == frontend::Atom::Kind::Cmp &&
         (a.lhs.kind == frontend::Operand::Kind::Param ||
          a.rhs.kind == frontend::Operand::Kind::Param);
}

PredicatePtr atom_predicate(const frontend::Atom& a,
                            const std::vector<std::string>& root) {
  using frontend::Atom;
  using frontend::Operand;
  switch (a.kind) {
    case Atom::Kind::Contains:
      return Predicate::contains(join_path(root, a.cpath.rel), a.needle);
    case Atom::Kind::InSet:
      return Predicate::in_set(join_path(root, a.cpath.rel), a.values);
    case Atom::Kind::Cmp: {
      if (a.lhs.kind != Operand::Kind::PathRef) {
        throw StreamError("adapter query: comparison needs a path subject");
      }
      Path lp = join_path(root, a.lhs.path.rel);
      switch (a.rhs.kind) {
        case Operand::Kind::PathRef:
          return Predicate::cmp_attrs(lp, a.op, join_path(root, a.rhs.path.rel));
        case Operand::Kind::Number:
          return Predicate::cmp(lp, a.op, Constant::decimal(a.rhs.lit));
        case Operand::Kind::String:
          return Predicate::cmp(lp, a.op, Constant::string(a.rhs.lit));
        case Operand::Kind::Param:
          break;  // handled by the batching layer
      }
      throw StreamError("adapter query: '?' slot outside a batched call");
    }
  }
  throw StreamError("adapter query: unsupported condition");
}

// Relative path of the single slot atom's subject.
std::vector<std::string> slot_rel(const AdapterQueryParts& parts) {
  for (const auto& g : parts.where) {
    for (const auto& a : g.atoms) {
      if (is_slot_atom(a)) return a.lhs.path.rel;
    }
  }
  throw StreamError("adapter query: no '?' slot found");
}

// Minimal tuple over the predicate's paths so adapters evaluate conditions
// through the engine's own comparison semantics.
bool doc_passes(const PredicatePtr& pred, const std::vector<XTreePtr>& forest) {
  if (!pred || pred->kind == Predicate::Kind::True) return true;
  std::vector<Path> attrs;
  for (const Path& p : pred->mentioned_paths()) {
    if (std::find(attrs.begin(), attrs.end(), p) == attrs.end()) {
      attrs.push_back(p);
    }
  }
  XRelationSchema schema;
  schema.attributes = attrs;
  schema.guide = make_guide(attrs);
  XTuple t;
  t.forest = forest;
  t.bindings.resize(attrs.size());
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    for (std::uint32_t ti = 0; ti < forest.size(); ++ti) {
      if (forest[ti]->root_label() != attrs[i].root()) continue;
      for (NodeId n : forest[ti]->find(attrs[i])) {
        t.bindings[i].push_back(NodeRef{ti, n});
      }
    }
  }
  return eval_predicate(*pred, schema, t, nullptr);
}

// Emits the subtree at n, keeping only nodes on an ancestor-or-descendant
// line with one of keep (empty keep = everything).
void emit_subtree(const XTree& tree, NodeId n, const std::vector<Path>& keep,
                  std::vector<Event>* out) {
  if (!keep.empty()) {
    Path np = tree.path_of(n);
    bool wanted = false;
    for (const Path& k : keep) {
      if (np.is_prefix_of(k) || k.is_prefix_of(np)) {
        wanted = true;
        break;
      }
    }
    if (!wanted) return;
  }
  const XTree::Node& node = tree.node(n);
  out->push_back(Event::open(node.label));
  if (!node.text.empty()) out->push_back(Event::text(node.text));
  for (NodeId c : node.children) emit_subtree(tree, c, keep, out);
  out->push_back(Event::close());
}

// Concatenates the streams produced by a list of factories, in order.
class ChainEventStream : public EventStream {
 public:
  explicit ChainEventStream(std::vector<std::function<EventStreamPtr()>> make)
      : make_(std::move(make)) {}

  Event next() override {
    for (;;) {
      if (done_) return Event::end();
      if (!cur_) {
        if (idx_ >= make_.size()) {
          done_ = true;
          return Event::end();
        }
        cur_ = make_[idx_++]();
      }
      Event e = cur_->next();
      if (e.kind == Event::Kind::End) {
        cur_.reset();
        continue;
      }
      if (e.kind == Event::Kind::Error) done_ = true;
      return e;
    }
  }

 private:
  std::vector<std::function<EventStreamPtr()>> make_;
  EventStreamPtr cur_;
  std::size_t idx_ = 0;
  bool done_ = false;
};

// Documents of one collection, filtered by pred, pruned to keep paths.
class FileScanStream : public EventStream {
 public:
  FileScanStream(const std::vector<std::string>* docs, PredicatePtr pred,
                 std::vector<Path> keep)
      : docs_(docs), pred_(std::move(pred)), keep_(std::move(keep)) {}

  Event next() override {
    while (pos_ >= out_.size()) {
      if (idx_ >= docs_->size()) return Event::end();
      out_.clear();
      pos_ = 0;
      const std::string& text = (*docs_)[idx_++];
      std::vector<XTreePtr> forest;
      try {
        forest = parse_document(text);
      } catch (const std::exception& e) {
        out_.push_back(Event::error(std::string("backing store: ") + e.what()));
        idx_ = docs_->size();
        break;
      }
      if (!doc_passes(pred_, forest)) continue;
      for (const XTreePtr& t : forest) {
        emit_subtree(*t, t->root(), keep_, &out_);
      }
      out_.push_back(Event::boundary());
    }
    return out_[pos_++];
  }

 private:
  const std::vector<std::string>* docs_;
  PredicatePtr pred_;
  std::vector<Path> keep_;
  std::vector<Event> out_;
  std::size_t pos_ = 0;
  std::size_t idx_ = 0;
};

// Root label served by a file collection: the explicit suffix when one is
// given (checked against the store), else the first readable document's
// root. Empty when nothing in the store parses.
std::string file_root(const std::string& id, const std::string& collection,
                      const std::vector<std::string>& docs,
                      const std::vector<std::string>& suffix) {
  std::string stored;
  for (const std::string& d : docs) {
    try {
      std::vector<XTreePtr> forest = parse_document(d);
      if (forest.empty()) continue;
      stored = forest.front()->root_label();
      break;
    } catch (const StreamError&) {
    }
  }
  if (suffix.empty()) return stored;
  if (suffix.size() != 1 || (!stored.empty() && suffix[0] != stored)) {
    throw StreamError("adapter " + id + ": collection " + collection +
                      " has root " + stored);
  }
  return suffix[0];
}

std::vector<std::vector<std::string>> key_chunks(
    const std::vector<std::string>& keys) {
  std::vector<std::vector<std::string>> chunks;
  std::set<std::string> seen;
  for (const std::string& k : keys) {
    if (!seen.insert(k).second) continue;  // membership semantics
    if (chunks.empty() || chunks.back().size() >= Adapter::kMaxBatchKeys) {
      chunks.emplace_back();
    }
    chunks.back().push_back(k);
  }
  if (chunks.empty()) throw StreamError("execute_batched: no keys");
  return chunks;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in.good()) throw StreamError("cannot read " + p.string());
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

// Splits a file's content into one serialized document per top-level
// element, normalizing through the engine's tree form.
std::vector<std::string> split_documents(const std::string& content) {
  std::vector<std::string> docs;
  XmlEventStream ev(content);
  std::unique_ptr<XTree> cur;
  std::vector<NodeId> stack;
  for (;;) {
    Event e = ev.next();
    switch (e.kind) {
      case Event::Kind::Open:
        if (!cur) {
          cur = std::make_unique<XTree>(e.data);
          stack = {cur->root()};
        } else {
          stack.push_back(cur->add_child(stack.back(), e.data));
        }
        break;
      case Event::Kind::Text:
        cur->set_text(stack.back(), e.data);
        break;
      case Event::Kind::Close:
        stack.pop_back();
        if (stack.empty()) {
          docs.push_back(cur->serialize());
          cur.reset();
        }
        break;
      case Event::Kind::Boundary:
        break;
      case Event::Kind::End:
        return docs;
      case Event::Kind::Error:
        throw StreamError("backing store: " + e.data);
    }
  }
}

std::vector<std::filesystem::path> dir_files(const std::string& dir,
                                             const std::string& ext) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ext) files.push_back(entry.path());
  }
  if (ec) throw StreamError("cannot list " + dir + ": " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

ByteStreamPtr Adapter::execute_wire(const AdapterQuery&) {
  throw StreamError("adapter " + id() + ": no tuple channel for capability " +
                    capability_name(capability()));
}

AdapterQueryParts parse_adapter_query(const std::string& text) {
  frontend::QueryAst ast;
  try {
    ast = frontend::normalize(frontend::parse(text));
  } catch (const frontend::ParseError& e) {
    throw StreamError(std::string("adapter query: ") + e.what());
  } catch (const PlanError& e) {
    throw StreamError(std::string("adapter query: ") + e.what());
  }
  if (ast.fors.size() != 1 || !ast.fors[0].over_collection) {
    throw StreamError("adapter query: exactly one collection binding required");
  }
  AdapterQueryParts parts;
  parts.var = ast.fors[0].var;
  parts.collection = ast.fors[0].collection;
  parts.root = ast.fors[0].suffix;
  if (parts.collection == "*") {
    throw StreamError("adapter query: collection name must be concrete");
  }
  parts.where = ast.where;
  for (const auto& g : ast.where) {
    for (const auto& a : g.atoms) {
      if (is_slot_atom(a)) {
        if (a.kind != frontend::Atom::Kind::Cmp ||
            a.op != CmpOp::Eq ||
            a.lhs.kind != frontend::Operand::Kind::PathRef ||
            a.lhs.path.rel.empty() || g.atoms.size() != 1) {
          throw StreamError(
              "adapter query: a slot atom must be path = ? on its own");
        }
        ++parts.slots;
      }
    }
  }

  auto add_col = [&parts](const frontend::ReturnNode& n) {
    if (n.kind != frontend::ReturnNode::Kind::Placeholder) {
      throw StreamError(
          "adapter query: return the bound variable or a path list");
    }
    if (n.path.rel.empty()) {
      throw StreamError("adapter query: projection entries need a path");
    }
    parts.cols.push_back(n.path.rel);
  };
  if (ast.ret.size() == 1 &&
      ast.ret[0].kind == frontend::ReturnNode::Kind::Placeholder &&
      ast.ret[0].path.rel.empty()) {
    parts.whole_doc = true;
  } else if (ast.ret.size() == 1 &&
             ast.ret[0].kind == frontend::ReturnNode::Kind::Group) {
    for (const auto& c : ast.ret[0].children) add_col(c);
  } else {
    for (const auto& n : ast.ret) add_col(n);
  }

  // Every referenced variable is the binding itself (single scope).
  auto check_var = [&parts](const frontend::VarPath& p) {
    if (p.var != parts.var) {
      throw StreamError("adapter query: unknown variable $" + p.var);
    }
  };
  for (const auto& g : parts.where) {
    for (const auto& a : g.atoms) {
      if (a.kind == frontend::Atom::Kind::Cmp) {
        if (a.lhs.kind == frontend::Operand::Kind::PathRef) check_var(a.lhs.path);
        if (a.rhs.kind == frontend::Operand::Kind::PathRef) check_var(a.rhs.path);
      } else {
        check_var(a.cpath);
      }
    }
  }
  return parts;
}

PredicatePtr adapter_predicate(const AdapterQueryParts& parts,
                               const std::vector<std::string>& root_steps) {
  std::vector<PredicatePtr> groups;
  for (const auto& g : parts.where) {
    std::vector<PredicatePtr> alts;
    for (const auto& a : g.atoms) {
      if (is_slot_atom(a)) continue;
      alts.push_back(atom_predicate(a, root_steps));
    }
    if (alts.empty()) continue;
    groups.push_back(alts.size() == 1 ? alts[0] : Predicate::disj(alts));
  }
  if (groups.empty()) return Predicate::always_true();
  return groups.size() == 1 ? groups[0] : Predicate::conj(groups);
}

// ---------------------------------------------------------------------------
// FileAdapter

FileAdapter::FileAdapter(std::string id,
                         std::map<std::string, std::vector<std::string>> docs)
    : id_(std::move(id)), docs_(std::move(docs)) {
  meta_.id = id_;
  meta_.capability = Capability::XmlFile;
  for (const auto& [name, collection_docs] : docs_) {
    if (collection_docs.empty()) continue;  // no shape to describe
    CollectionMetadata m;
    m.name = name;
    // Unparseable documents are still store entries; they fault when read,
    // not here, so the guide covers whatever does parse.
    m.guide = std::make_shared<Dataguide>();
    for (const std::string& doc : collection_docs) {
      try {
        m.guide = guide_union(m.guide, infer_default_guide({doc}));
      } catch (const StreamError&) {
      }
    }
    m.cardinality = collection_docs.size();
    meta_.collections.push_back(std::move(m));
  }
}

std::shared_ptr<FileAdapter> FileAdapter::from_dir(std::string id,
                                                   const std::string& dir) {
  std::map<std::string, std::vector<std::string>> docs;
  for (const auto& p : dir_files(dir, ".xml")) {
    docs[p.stem().string()] = split_documents(read_file(p));
  }
  return std::make_shared<FileAdapter>(std::move(id), std::move(docs));
}

std::string FileAdapter::get_metadata() { return descriptor_to_xml(meta_); }

EventStreamPtr FileAdapter::execute(const AdapterQuery& q) {
  AdapterQueryParts parts = parse_adapter_query(q.text);
  if (parts.slots != 0) {
    throw StreamError("adapter " + id_ + ": '?' slots need execute_batched");
  }
  auto it = docs_.find(parts.collection);
  if (it == docs_.end() || it->second.empty()) {
    throw StreamError("adapter " + id_ + ": unknown collection " +
                      parts.collection);
  }
  std::string root = file_root(id_, parts.collection, it->second, parts.root);
  PredicatePtr pred = Predicate::always_true();
  std::vector<Path> keep;
  if (!root.empty()) {
    std::vector<std::string> root_steps = {root};
    pred = adapter_predicate(parts, root_steps);
    for (const auto& rel : parts.cols) {
      keep.push_back(join_path(root_steps, rel));
    }
  }
  return std::make_unique<FileScanStream>(&it->second, std::move(pred),
                                          std::move(keep));
}

EventStreamPtr FileAdapter::execute_batched(const AdapterQuery& q,
                                            const std::vector<std::string>& keys) {
  AdapterQueryParts parts = parse_adapter_query(q.text);
  if (parts.slots != 1) {
    throw StreamError("adapter " + id_ +
                      ": execute_batched needs exactly one '?' slot");
  }
  auto it = docs_.find(parts.collection);
  if (it == docs_.end() || it->second.empty()) {
    throw StreamError("adapter " + id_ + ": unknown collection " +
                      parts.collection);
  }
  std::string root = file_root(id_, parts.collection, it->second, parts.root);
  if (root.empty()) {
    throw StreamError("adapter " + id_ + ": collection " + parts.collection +
                      " has no readable documents");
  }
  std::vector<std::string> root_steps = {root};
  PredicatePtr base = adapter_predicate(parts, root_steps);
  Path slot_path = join_path(root_steps, slot_rel(parts));
  std::vector<Path> keep;
  for (const auto& rel : parts.cols) keep.push_back(join_path(root_steps, rel));

  std::vector<std::function<EventStreamPtr()>> make;
  const std::vector<std::string>* docs = &it->second;
  for (auto& chunk : key_chunks(keys)) {
    PredicatePtr pred =
        Predicate::conj({base, Predicate::in_set(slot_path, chunk)});
    make.push_back([docs, pred, keep] {
      return std::make_unique<FileScanStream>(docs, pred, keep);
    });
  }
  return std::make_unique<ChainEventStream>(std::move(make));
}

// ---------------------------------------------------------------------------
// TabularAdapter

namespace {

// One element tree per passing row, leaf per projected column.
class TableScanStream : public EventStream {
 public:
  TableScanStream(const TabularAdapter::Table* table, std::string root,
                  std::vector<std::string> leaf_names, PredicatePtr pred,
                  std::vector<std::size_t> projected)
      : table_(table),
        root_(std::move(root)),
        leaf_names_(std::move(leaf_names)),
        pred_(std::move(pred)),
        projected_(std::move(projected)) {}

  Event next() override {
    while (pos_ >= out_.size()) {
      if (row_ >= table_->rows.size()) return Event::end();
      const std::vector<std::string>& row = table_->rows[row_++];
      if (!row_passes(row)) continue;
      out_.clear();
      pos_ = 0;
      out_.push_back(Event::open(root_));
      for (std::size_t c : projected_) {
        out_.push_back(Event::open(leaf_names_[c]));
        if (!row[c].empty()) out_.push_back(Event::text(row[c]));
        out_.push_back(Event::close());
      }
      out_.push_back(Event::close());
      out_.push_back(Event::boundary());
    }
    return out_[pos_++];
  }

 private:
  bool row_passes(const std::vector<std::string>& row) const {
    if (!pred_ || pred_->kind == Predicate::Kind::True) return true;
    auto tree = std::make_shared<XTree>(root_);
    for (std::size_t c = 0; c < leaf_names_.size(); ++c) {
      NodeId n = tree->add_child(tree->root(), leaf_names_[c]);
      if (!row[c].empty()) tree->set_text(n, row[c]);
    }
    return doc_passes(pred_, {tree});
  }

  const TabularAdapter::Table* table_;
  std::string root_;
  std::vector<std::string> leaf_names_;
  PredicatePtr pred_;
  std::vector<std::size_t> projected_;
  std::vector<Event> out_;
  std::size_t pos_ = 0;
  std::size_t row_ = 0;
};

}  // namespace

TabularAdapter::TabularAdapter(std::string id, std::map<std::string, Table> tables)
    : id_(std::move(id)), tables_(std::move(tables)) {
  meta_.id = id_;
  meta_.capability = Capability::Tabular;
  for (const auto& [name, table] : tables_) {
    for (const auto& row : table.rows) {
      if (row.size() != table.columns.size()) {
        throw StreamError("table " + name + ": row width mismatch");
      }
    }
    CollectionMetadata m;
    m.name = name;
    std::string root = lower(name);
    std::vector<Path> paths = {Path::parse(root)};
    for (const auto& col : table.columns) {
      paths.push_back(Path::parse(root + "/" + lower(col)));
    }
    m.guide = make_guide(paths);
    m.cardinality = table.rows.size();
    meta_.collections.push_back(std::move(m));
  }
}

std::shared_ptr<TabularAdapter> TabularAdapter::from_dir(std::string id,
                                                         const std::string& dir) {
  std::map<std::string, Table> tables;
  for (const auto& p : dir_files(dir, ".tsv")) {
    std::string content = read_file(p);
    Table t;
    std::istringstream lines(content);
    std::string line;
    bool header = true;
    while (std::getline(lines, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::size_t start = 0;
      for (;;) {
        std::size_t tab = line.find('\t', start);
        cells.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (header) {
        t.columns = std::move(cells);
        header = false;
      } else {
        t.rows.push_back(std::move(cells));
      }
    }
    if (!t.columns.empty()) tables[p.stem().string()] = std::move(t);
  }
  return std::make_shared<TabularAdapter>(std::move(id), std::move(tables));
}

std::string TabularAdapter::get_metadata() { return descriptor_to_xml(meta_); }

EventStreamPtr TabularAdapter::execute(const AdapterQuery& q) {
  AdapterQueryParts parts = parse_adapter_query(q.text);
  if (parts.slots != 0) {
    throw StreamError("adapter " + id_ + ": '?' slots need execute_batched");
  }
  return scan(parts, nullptr);
}

EventStreamPtr TabularAdapter::scan(const AdapterQueryParts& parts,
                                    const std::vector<std::string>* keys) {
  auto it = tables_.find(parts.collection);
  if (it == tables_.end()) {
    throw StreamError("adapter " + id_ + ": unknown table " + parts.collection);
  }
  const Table& table = it->second;
  std::string root = lower(parts.collection);
  if (!parts.root.empty() &&
      (parts.root.size() != 1 || parts.root[0] != root)) {
    throw StreamError("adapter " + id_ + ": table " + parts.collection +
                      " has root " + root);
  }
  std::vector<std::string> leaf_names;
  leaf_names.reserve(table.columns.size());
  for (const auto& col : table.columns) leaf_names.push_back(lower(col));

  auto col_index = [&](const std::vector<std::string>& rel) {
    if (rel.size() != 1) {
      throw StreamError("adapter " + id_ + ": tabular paths are one step deep");
    }
    for (std::size_t c = 0; c < leaf_names.size(); ++c) {
      if (leaf_names[c] == rel[0]) return c;
    }
    throw StreamError("adapter " + id_ + ": unknown column " + rel[0]);
  };

  std::vector<std::size_t> projected;
  if (parts.whole_doc) {
    for (std::size_t c = 0; c < leaf_names.size(); ++c) projected.push_back(c);
  } else {
    for (const auto& rel : parts.cols) projected.push_back(col_index(rel));
  }

  std::vector<std::string> root_steps = {root};
  PredicatePtr pred = adapter_predicate(parts, root_steps);
  for (const Path& p : pred->mentioned_paths()) {
    col_index(std::vector<std::string>(p.steps().begin() + 1, p.steps().end()));
  }
  if (keys) {
    std::vector<std::string> rel = slot_rel(parts);
    col_index(rel);
    pred = Predicate::conj(
        {pred, Predicate::in_set(join_path(root_steps, rel), *keys)});
  }
  return std::make_unique<TableScanStream>(&table, std::move(root),
                                           std::move(leaf_names), std::move(pred),
                                           std::move(projected));
}

EventStreamPtr TabularAdapter::execute_batched(const AdapterQuery& q,
                                               const std::vector<std::string>& keys) {
  AdapterQueryParts parts = parse_adapter_query(q.text);
  if (parts.slots != 1) {
    throw StreamError("adapter " + id_ +
                      ": execute_batched needs exactly one '?' slot");
  }
  // Tabular scans are cheap row loops, so chunking adds nothing; one InSet
  // over all distinct keys keeps the multiset semantics.
  std::vector<std::string> distinct;
  std::set<std::string> seen;
  for (const auto& k : keys) {
    if (seen.insert(k).second) distinct.push_back(k);
  }
  if (distinct.empty()) throw StreamError("execute_batched: no keys");
  return scan(parts, &distinct);
}

}  // namespace xfed
