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

#ifndef XFED_CATALOG_HPP_
#define XFED_CATALOG_HPP_

// Metadata manager: which source serves which collection, under which
// capability, with which dataguide. The planner asks it where path sets can
// be answered; answers carry explicit joker expansions.

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "xtuple.hpp"

namespace xfed {

// What may be pushed to a source: the full query subset, select/project per
// table, or only a selection filter over raw documents.
enum class Capability { QueryLanguage, Tabular, XmlFile };

const char* capability_name(Capability c);
std::optional<Capability> capability_from(std::string_view name);

struct CollectionMetadata {
  std::string name;
  DataguidePtr guide;            // prefix-closed, one shared root step
  std::uint64_t cardinality = 0; // declared tuple count, 0 = unknown
};

struct SourceDescriptor {
  std::string id;
  std::string transport;  // "" = in-process, else "host:port"
  Capability capability = Capability::XmlFile;
  std::vector<CollectionMetadata> collections;
};

// Descriptor document: <source> with <id>, <capability>, optional
// <transport>, then one <collection> per collection holding <name>,
// optional <cardinality> and one <path> element per dataguide path.
// A guide that is not prefix-closed is closed silently except for a
// warning on diag. Malformed documents throw StreamError.
SourceDescriptor parse_descriptor(const std::string& xml_text,
                                  DiagnosticsPtr diag = nullptr);
std::string descriptor_to_xml(const SourceDescriptor& d);

// Default schema for a collection without one: every root-to-node path
// seen across the sample documents.
DataguidePtr infer_default_guide(const std::vector<std::string>& samples);

// One joker step ('*') matches exactly one element name.
struct PathExpansion {
  Path required;
  std::vector<Path> expansions;  // concrete guide paths, sorted
};

struct CollectionHit {
  std::string source_id;
  std::string collection;
  Capability capability = Capability::XmlFile;
  std::string transport;
  std::uint64_t cardinality = 0;
  std::vector<PathExpansion> paths;  // aligned with the required list
};

class Catalog {
 public:
  // Replaces any prior registration with the same id.
  void register_source(SourceDescriptor d);
  void register_source_xml(const std::string& xml_text,
                           DiagnosticsPtr diag = nullptr);

  // Every (source, collection) matching the name pattern ("*" = any) whose
  // dataguide covers all required paths. A joker expanding to more than 32
  // guide paths in one collection is a planning error.
  std::vector<CollectionHit> lookup(const std::string& pattern,
                                    const std::vector<Path>& required) const;

  std::optional<SourceDescriptor> source(const std::string& id) const;
  std::vector<std::string> source_ids() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, SourceDescriptor> sources_;
};

}  // namespace xfed

#endif  // XFED_CATALOG_HPP_
