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

#ifndef XFED_ADAPTERS_HPP_
#define XFED_ADAPTERS_HPP_

// Source wrappers behind one query interface: XML document stores, tabular
// row stores, and (in the engine module) the engine itself. Every adapter
// answers get_metadata with a descriptor document and runs single-collection
// queries written in the frontend grammar.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xfed/catalog.hpp"
#include "xfed/events.hpp"
#include "xfed/frontend.hpp"
#include "xfed/predicate.hpp"

namespace xfed {

struct AdapterQuery {
  std::string text;
};

// Pull channel of encoded tuple bytes (see wire.hpp); empty optional ends
// the stream. Offered only by query-language adapters.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual std::optional<std::vector<std::uint8_t>> next() = 0;
};
using ByteStreamPtr = std::unique_ptr<ByteStream>;

class Adapter {
 public:
  // Upper bound on keys per issued batch; larger key sets are split
  // transparently by execute_batched.
  static constexpr std::size_t kMaxBatchKeys = 64;

  virtual ~Adapter() = default;
  virtual const std::string& id() const = 0;
  virtual Capability capability() const = 0;

  // Descriptor document as defined by the catalog; dataguides are inferred
  // from store content when not configured.
  virtual std::string get_metadata() = 0;

  // Runs a slot-free query. Queries outside the adapter's capability are
  // rejected with StreamError before any event is produced.
  virtual EventStreamPtr execute(const AdapterQuery& q) = 0;

  // Runs a query holding exactly one '?' slot, equal in content to running
  // it once per distinct key and concatenating the results.
  virtual EventStreamPtr execute_batched(const AdapterQuery& q,
                                         const std::vector<std::string>& keys) = 0;

  // Tuple-encoded results; default refuses (document capabilities).
  virtual ByteStreamPtr execute_wire(const AdapterQuery& q);
};
using AdapterPtr = std::shared_ptr<Adapter>;

// Validated shape shared by the concrete adapters: one for binding over one
// named collection, a conjunctive condition, and either the whole document
// or a list of variable-relative paths.
struct AdapterQueryParts {
  std::string var;
  std::string collection;
  std::vector<std::string> root;  // explicit steps after the source
  std::vector<frontend::OrGroup> where;
  bool whole_doc = false;
  std::vector<std::vector<std::string>> cols;  // relative step lists
  std::size_t slots = 0;
};

// Parses and validates adapter query text. Throws StreamError for anything
// a capability adapter can never run: several bindings, joker collections,
// nested queries, constructors or aggregates in the return clause.
AdapterQueryParts parse_adapter_query(const std::string& text);

// Conjunction of the slot-free condition groups, rooted at root_steps.
// Slot atoms are skipped (the batching layer replaces them).
PredicatePtr adapter_predicate(const AdapterQueryParts& parts,
                               const std::vector<std::string>& root_steps);

// Document-store adapter (capability xml-file). Selection filters whole
// documents; a path-list return prunes each document down to the subtrees
// on those paths. Stores are immutable after construction, so concurrent
// executions share them safely.
class FileAdapter : public Adapter {
 public:
  // One entry per collection: the collection's documents in store order.
  FileAdapter(std::string id,
              std::map<std::string, std::vector<std::string>> docs);

  // Loads every *.xml file of dir as one collection named by its stem; a
  // file may hold several top-level elements (one document each).
  static std::shared_ptr<FileAdapter> from_dir(std::string id,
                                               const std::string& dir);

  const std::string& id() const override { return id_; }
  Capability capability() const override { return Capability::XmlFile; }
  std::string get_metadata() override;
  EventStreamPtr execute(const AdapterQuery& q) override;
  EventStreamPtr execute_batched(const AdapterQuery& q,
                                 const std::vector<std::string>& keys) override;

 private:
  std::string id_;
  std::map<std::string, std::vector<std::string>> docs_;
  SourceDescriptor meta_;
};

// Row-store adapter (capability tabular). Queries translate to a scan with
// a row predicate and a column projection; each passing row becomes one
// element tree, leaf per column. Root and leaf names are the lower-cased
// table and column names. Row order is storage order, so repeated
// executions are byte-identical.
class TabularAdapter : public Adapter {
 public:
  struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // each aligned with columns
  };

  TabularAdapter(std::string id, std::map<std::string, Table> tables);

  // Loads every *.tsv file of dir as one table named by its stem; first
  // line holds the column names, tab-separated.
  static std::shared_ptr<TabularAdapter> from_dir(std::string id,
                                                  const std::string& dir);

  const std::string& id() const override { return id_; }
  Capability capability() const override { return Capability::Tabular; }
  std::string get_metadata() override;
  EventStreamPtr execute(const AdapterQuery& q) override;
  EventStreamPtr execute_batched(const AdapterQuery& q,
                                 const std::vector<std::string>& keys) override;

 private:
  // Shared scan path; keys, when given, restrict the slot column.
  EventStreamPtr scan(const AdapterQueryParts& parts,
                      const std::vector<std::string>* keys);

  std::string id_;
  std::map<std::string, Table> tables_;
  SourceDescriptor meta_;
};

}  // namespace xfed

#endif  // XFED_ADAPTERS_HPP_
