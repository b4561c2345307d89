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
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "xfed/adapters.hpp"
#include "xfed/catalog.hpp"
#include "xfed/dataset.hpp"
#include "xfed/xtree.hpp"

using namespace xfed;

namespace {

Path P(const std::string& s) { return Path::parse(s); }

AdapterQuery Q(std::string text) { return AdapterQuery{std::move(text)}; }

template <typename E, typename F>
std::string error_text(F f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  return "";
}

bool has(const std::string& s, const std::string& needle) {
  return s.find(needle) != std::string::npos;
}

// Renders an adapter stream back to serialized documents while checking the
// event grammar: close matches an open, text sits inside an element,
// boundary and end occur at depth zero only, end is sticky.
std::vector<std::string> docs_of(EventStreamPtr s, bool* saw_error = nullptr) {
  std::vector<std::string> docs;
  std::string cur;
  std::vector<std::string> open;
  for (;;) {
    Event e = s->next();
    switch (e.kind) {
      case Event::Kind::Open:
        cur += "<" + e.data + ">";
        open.push_back(e.data);
        break;
      case Event::Kind::Text:
        REQUIRE(!open.empty());
        append_escaped(e.data, cur);
        break;
      case Event::Kind::Close:
        REQUIRE(!open.empty());
        cur += "</" + open.back() + ">";
        open.pop_back();
        break;
      case Event::Kind::Boundary:
        REQUIRE(open.empty());
        docs.push_back(cur);
        cur.clear();
        break;
      case Event::Kind::End:
        REQUIRE(open.empty());
        REQUIRE(cur.empty());
        REQUIRE(s->next().kind == Event::Kind::End);
        return docs;
      case Event::Kind::Error:
        REQUIRE(saw_error != nullptr);
        *saw_error = true;
        REQUIRE(s->next().kind == Event::Kind::End);
        return docs;
    }
  }
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

const std::vector<std::string>& people_docs() {
  static const std::vector<std::string> docs = {
      "<personne><prenom>Jean</prenom><nom>Roy</nom></personne>",
      "<personne><prenom>Lea</prenom><nom>Bo</nom><adresse>"
      "<rue>Main</rue><ville>Lyon</ville></adresse></personne>",
  };
  return docs;
}

const std::vector<std::string>& book_docs() {
  static const std::vector<std::string> docs = {
      "<livre><titre>X</titre><auteur><nom>Roy</nom></auteur>"
      "<date>1999</date></livre>",
      "<livre><titre>Y</titre></livre>",
  };
  return docs;
}

TabularAdapter::Table partsupp_table() {
  TabularAdapter::Table t;
  t.columns = {"SUPPKEY", "PARTKEY", "AVAILQTY", "SUPPLYCOST"};
  t.rows = {
      {"1", "7", "10", "1.5"},
      {"2", "8", "50", "2.5"},
      {"3", "9", "45", "3.0"},
      {"4", "10", "100", "4.25"},
  };
  return t;
}

const CollectionMetadata* find_collection(const SourceDescriptor& d,
                                          const std::string& name) {
  for (const auto& c : d.collections) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("adapters") {

TEST_CASE("file adapter metadata lists inferred guides and cardinalities") {
  FileAdapter a("S1", {{"PEOPLE", people_docs()},
                       {"BOOKS", book_docs()},
                       {"EMPTY", {}}});
  SourceDescriptor d = parse_descriptor(a.get_metadata());
  CHECK(d.id == "S1");
  CHECK(d.capability == Capability::XmlFile);
  REQUIRE(d.collections.size() == 2);  // EMPTY has no shape to describe

  const CollectionMetadata* people = find_collection(d, "PEOPLE");
  REQUIRE(people != nullptr);
  CHECK(people->cardinality == 2);
  Dataguide expect_people = {P("personne"),
                             P("personne/prenom"),
                             P("personne/nom"),
                             P("personne/adresse"),
                             P("personne/adresse/rue"),
                             P("personne/adresse/ville")};
  CHECK(*people->guide == expect_people);

  const CollectionMetadata* books = find_collection(d, "BOOKS");
  REQUIRE(books != nullptr);
  CHECK(books->cardinality == 2);
  Dataguide expect_books = {P("livre"), P("livre/titre"), P("livre/auteur"),
                            P("livre/auteur/nom"), P("livre/date")};
  CHECK(*books->guide == expect_books);
}

TEST_CASE("tabular metadata lowers table and column names") {
  TabularAdapter::Table t;
  t.columns = {"ORDERKEY", "COMMENT"};
  t.rows = {{"1", "fast"}, {"2", ""}, {"3", "slow"}};
  TabularAdapter a("T1", {{"ORDERS", t}});
  SourceDescriptor d = parse_descriptor(a.get_metadata());
  CHECK(d.id == "T1");
  CHECK(d.capability == Capability::Tabular);
  REQUIRE(d.collections.size() == 1);
  CHECK(d.collections[0].name == "ORDERS");
  CHECK(d.collections[0].cardinality == 3);
  Dataguide expect = {P("orders"), P("orders/orderkey"), P("orders/comment")};
  CHECK(*d.collections[0].guide == expect);

  TabularAdapter::Table bad = t;
  bad.rows.push_back({"4"});
  CHECK_THROWS_AS(TabularAdapter("T2", {{"ORDERS", bad}}), StreamError);
}

TEST_CASE("whole-document selection filters in store order") {
  std::vector<std::string> docs = {
      "<partsupp><suppkey>1</suppkey><availqty>10</availqty></partsupp>",
      "<partsupp><suppkey>2</suppkey><availqty>50</availqty></partsupp>",
      "<partsupp><suppkey>3</suppkey><availqty>45</availqty></partsupp>",
      "<partsupp><suppkey>4</suppkey><availqty>100</availqty></partsupp>",
  };
  FileAdapter a("A1", {{"PARTSUPP", docs}});

  auto got = docs_of(a.execute(Q(
      "for $ps in collection(\"PARTSUPP\")/partsupp "
      "where $ps/availqty > 45 return $ps")));
  REQUIRE(got.size() == 2);
  CHECK(got[0] == docs[1]);
  CHECK(got[1] == docs[3]);

  // No condition: every document, file order, byte-identical.
  auto all = docs_of(a.execute(
      Q("for $ps in collection(\"PARTSUPP\")/partsupp return $ps")));
  CHECK(all == docs);
}

TEST_CASE("path-list return prunes each document") {
  FileAdapter a("S1", {{"PEOPLE", people_docs()}});
  auto got = docs_of(a.execute(Q(
      "for $p in collection(\"PEOPLE\")/personne "
      "return ($p/prenom, $p/adresse/ville)")));
  REQUIRE(got.size() == 2);
  CHECK(got[0] == "<personne><prenom>Jean</prenom></personne>");
  CHECK(got[1] ==
        "<personne><prenom>Lea</prenom><adresse><ville>Lyon</ville>"
        "</adresse></personne>");
}

TEST_CASE("tabular scan filters rows and projects columns in query order") {
  TabularAdapter a("A1", {{"PARTSUPP", partsupp_table()}});

  auto got = docs_of(a.execute(Q(
      "for $ps in collection(\"PARTSUPP\")/partsupp "
      "where $ps/availqty > 45 "
      "return ($ps/suppkey, $ps/partkey, $ps/supplycost)")));
  REQUIRE(got.size() == 2);
  CHECK(got[0] ==
        "<partsupp><suppkey>2</suppkey><partkey>8</partkey>"
        "<supplycost>2.5</supplycost></partsupp>");
  CHECK(got[1] ==
        "<partsupp><suppkey>4</suppkey><partkey>10</partkey>"
        "<supplycost>4.25</supplycost></partsupp>");

  // Leaf order follows the query, not the header.
  auto swapped = docs_of(a.execute(Q(
      "for $ps in collection(\"PARTSUPP\")/partsupp "
      "where $ps/suppkey = \"1\" return ($ps/supplycost, $ps/suppkey)")));
  REQUIRE(swapped.size() == 1);
  CHECK(swapped[0] ==
        "<partsupp><supplycost>1.5</supplycost><suppkey>1</suppkey>"
        "</partsupp>");

  // Whole rows carry every column in header order.
  auto whole = docs_of(a.execute(Q(
      "for $ps in collection(\"PARTSUPP\")/partsupp "
      "where $ps/suppkey = \"3\" return $ps")));
  REQUIRE(whole.size() == 1);
  CHECK(whole[0] ==
        "<partsupp><suppkey>3</suppkey><partkey>9</partkey>"
        "<availqty>45</availqty><supplycost>3.0</supplycost></partsupp>");
}

TEST_CASE("empty cells become empty leaf elements") {
  TabularAdapter::Table t;
  t.columns = {"ORDERKEY", "COMMENT"};
  t.rows = {{"1", ""}};
  TabularAdapter a("T1", {{"ORDERS", t}});
  auto got = docs_of(
      a.execute(Q("for $o in collection(\"ORDERS\")/orders return $o")));
  REQUIRE(got.size() == 1);
  CHECK(got[0] ==
        "<orders><orderkey>1</orderkey><comment></comment></orders>");
}

TEST_CASE("repeated tabular executions are byte-identical") {
  TabularAdapter a("A1", {{"PARTSUPP", partsupp_table()}});
  std::string q =
      "for $ps in collection(\"PARTSUPP\")/partsupp "
      "where $ps/availqty > 20 return ($ps/suppkey)";
  auto first = docs_of(a.execute(Q(q)));
  auto second = docs_of(a.execute(Q(q)));
  CHECK(first == second);
  REQUIRE(first.size() == 3);
}

TEST_CASE("nation selection matches a brute-force filter") {
  dataset::Dataset ds = dataset::generate(1, 42);
  const std::vector<std::string>& nations = ds.stores["A6"]["NATION"];
  REQUIRE(nations.size() == 25);

  FileAdapter a6("A6", ds.stores["A6"]);
  auto got = docs_of(a6.execute(Q(
      "for $n in collection(\"NATION\")/nation "
      "where contains($n/comment, \"iron\") "
      "return ($n/nationkey, $n/name)")));

  // Independent oracle over the flat document shape: substring search for
  // the comment, then reassemble the two kept leaves.
  auto field = [](const std::string& doc, const std::string& tag) {
    std::string open = "<" + tag + ">";
    std::size_t b = doc.find(open) + open.size();
    return doc.substr(b, doc.find("</" + tag + ">") - b);
  };
  std::vector<std::string> expect;
  for (const std::string& doc : nations) {
    if (field(doc, "comment").find("iron") == std::string::npos) continue;
    expect.push_back("<nation><nationkey>" + field(doc, "nationkey") +
                     "</nationkey><name>" + field(doc, "name") +
                     "</name></nation>");
  }
  REQUIRE(expect.size() == 5);  // round(0.2 * 25)
  CHECK(got == expect);
}

TEST_CASE("batched execution equals per-key runs") {
  std::vector<std::string> docs;
  for (int i = 1; i <= 6; ++i) {
    std::string k = std::to_string(i);
    docs.push_back("<supplier><suppkey>" + k + "</suppkey><name>s" + k +
                   "</name></supplier>");
  }
  FileAdapter a("A4", {{"SUPPLIER", docs}});
  std::string slot_q =
      "for $s in collection(\"SUPPLIER\")/supplier "
      "where $s/suppkey = ? return $s";
  auto inlined = [&](const std::string& key) {
    return docs_of(a.execute(Q(
        "for $s in collection(\"SUPPLIER\")/supplier "
        "where $s/suppkey = \"" + key + "\" return $s")));
  };

  // Key order does not matter: the call is key-set membership.
  auto got = docs_of(a.execute_batched(Q(slot_q), {"5", "2"}));
  std::vector<std::string> per_key = inlined("5");
  for (const std::string& d : inlined("2")) per_key.push_back(d);
  CHECK(sorted(got) == sorted(per_key));
  REQUIRE(got.size() == 2);

  // Singleton batch equals the query with the constant inlined.
  CHECK(docs_of(a.execute_batched(Q(slot_q), {"3"})) == inlined("3"));

  // Repeated keys select each matching document once.
  CHECK(docs_of(a.execute_batched(Q(slot_q), {"2", "2", "2"})).size() == 1);

  // The extra condition still applies alongside the slot.
  auto narrowed = docs_of(a.execute_batched(
      Q("for $s in collection(\"SUPPLIER\")/supplier "
        "where $s/suppkey = ? and $s/name = \"s2\" return $s"),
      {"2", "3"}));
  REQUIRE(narrowed.size() == 1);
  CHECK(has(narrowed[0], "<suppkey>2</suppkey>"));
}

TEST_CASE("key sets beyond the batch limit split transparently") {
  std::vector<std::string> docs;
  for (int i = 1; i <= 70; ++i) {
    docs.push_back("<e><k>" + std::to_string(i) + "</k></e>");
  }
  FileAdapter a("A1", {{"ES", docs}});
  std::vector<std::string> keys;
  for (int i = 1; i <= 67; ++i) keys.push_back(std::to_string(i));

  auto got = docs_of(a.execute_batched(
      Q("for $e in collection(\"ES\")/e where $e/k = ? return $e"), keys));
  REQUIRE(got.size() == 67);
  std::vector<std::string> expect(docs.begin(), docs.begin() + 67);
  CHECK(sorted(got) == sorted(expect));

  // Same set through the tabular adapter.
  TabularAdapter::Table t;
  t.columns = {"K"};
  for (int i = 1; i <= 70; ++i) t.rows.push_back({std::to_string(i)});
  TabularAdapter ta("T1", {{"KS", t}});
  auto rows = docs_of(ta.execute_batched(
      Q("for $r in collection(\"KS\")/ks where $r/k = ? return $r"), keys));
  REQUIRE(rows.size() == 67);
  CHECK(rows.front() == "<ks><k>1</k></ks>");
  CHECK(rows.back() == "<ks><k>67</k></ks>");
}

TEST_CASE("queries outside the capability are rejected up front") {
  FileAdapter fa("F", {{"PEOPLE", people_docs()}});
  TabularAdapter ta("T", {{"PARTSUPP", partsupp_table()}});
  std::string people_all = "for $p in collection(\"PEOPLE\")/personne return $p";

  // Slots only make sense for batched execution, and vice versa.
  CHECK(has(error_text<StreamError>([&] {
          fa.execute(Q("for $p in collection(\"PEOPLE\")/personne "
                       "where $p/nom = ? return $p"));
        }),
        "execute_batched"));
  CHECK(has(error_text<StreamError>(
                [&] { fa.execute_batched(Q(people_all), {"x"}); }),
            "one '?' slot"));
  CHECK_THROWS_AS(fa.execute_batched(
                      Q("for $p in collection(\"PEOPLE\")/personne "
                        "where $p/nom = ? return $p"),
                      {}),
                  StreamError);

  // Shapes no capability adapter runs.
  CHECK(has(error_text<StreamError>([&] {
          parse_adapter_query(
              "for $a in collection(\"X\"), $b in collection(\"Y\") "
              "return $a");
        }),
        "exactly one collection binding"));
  CHECK(has(error_text<StreamError>([&] {
          parse_adapter_query("for $a in collection(\"*\")/e return $a");
        }),
        "concrete"));
  CHECK(has(error_text<StreamError>([&] {
          parse_adapter_query(
              "for $p in collection(\"PEOPLE\")/personne "
              "return <r>$p/nom</r>");
        }),
        "path list"));
  CHECK(has(error_text<StreamError>([&] {
          parse_adapter_query(
              "for $p in collection(\"PEOPLE\")/personne "
              "return aggregate(count, $p/nom)");
        }),
        "path list"));
  CHECK(has(error_text<StreamError>([&] {
          parse_adapter_query(
              "for $p in collection(\"PEOPLE\")/personne return ($p, $p/nom)");
        }),
        "need a path"));

  // Store lookups.
  CHECK(has(error_text<StreamError>([&] {
          fa.execute(Q("for $x in collection(\"NOPE\")/x return $x"));
        }),
        "unknown collection"));
  CHECK(has(error_text<StreamError>([&] {
          ta.execute(Q("for $x in collection(\"NOPE\")/x return $x"));
        }),
        "unknown table"));
  CHECK(has(error_text<StreamError>([&] {
          ta.execute(Q("for $ps in collection(\"PARTSUPP\")/partsupp "
                       "return ($ps/nope)"));
        }),
        "unknown column"));
  CHECK(has(error_text<StreamError>([&] {
          ta.execute(Q("for $ps in collection(\"PARTSUPP\")/partsupp "
                       "return ($ps/a/b)"));
        }),
        "one step deep"));
  CHECK(has(error_text<StreamError>([&] {
          ta.execute(Q("for $ps in collection(\"PARTSUPP\")/wrong return $ps"));
        }),
        "has root"));
  CHECK(has(error_text<StreamError>([&] {
          fa.execute(Q("for $p in collection(\"PEOPLE\")/wrong return $p"));
        }),
        "has root"));

  // Document capabilities have no tuple channel.
  CHECK(has(error_text<StreamError>([&] { fa.execute_wire(Q(people_all)); }),
            "xml-file"));
  CHECK(has(error_text<StreamError>([&] {
          ta.execute_wire(Q("for $ps in collection(\"PARTSUPP\")/partsupp "
                            "return $ps"));
        }),
        "tabular"));
}

TEST_CASE("backing store faults surface as in-band error events") {
  FileAdapter a("F", {{"BAD", {"<a><b>ok</b></a>", "<a><b></a>"}}});
  bool saw_error = false;
  auto got = docs_of(
      a.execute(Q("for $x in collection(\"BAD\")/a return $x")), &saw_error);
  CHECK(saw_error);
  REQUIRE(got.size() == 1);  // the healthy document was already delivered
  CHECK(got[0] == "<a><b>ok</b></a>");
}

TEST_CASE("directory loading round trips stores and splits multi-doc files") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "xfed_adapter_dirs";
  fs::remove_all(dir);
  fs::create_directories(dir / "files");
  fs::create_directories(dir / "tables");
  fs::create_directories(dir / "empty");
  {
    std::ofstream f(dir / "files" / "people.xml");
    f << people_docs()[0] << "\n" << people_docs()[1] << "\n";
    std::ofstream g(dir / "files" / "books.xml");
    g << book_docs()[1];
    std::ofstream t(dir / "tables" / "orders.tsv");
    t << "ORDERKEY\tCOMMENT\n1\tfast\n2\t\n";
  }

  auto fa = FileAdapter::from_dir("D1", (dir / "files").string());
  SourceDescriptor d = parse_descriptor(fa->get_metadata());
  REQUIRE(d.collections.size() == 2);
  const CollectionMetadata* people = find_collection(d, "people");
  REQUIRE(people != nullptr);
  CHECK(people->cardinality == 2);
  auto got = docs_of(
      fa->execute(Q("for $p in collection(\"people\")/personne return $p")));
  CHECK(got == people_docs());

  auto ta = TabularAdapter::from_dir("D2", (dir / "tables").string());
  auto rows = docs_of(
      ta->execute(Q("for $o in collection(\"orders\")/orders return $o")));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "<orders><orderkey>1</orderkey><comment>fast</comment>"
                   "</orders>");

  // An empty directory serves a descriptor with no collections.
  auto ea = FileAdapter::from_dir("D3", (dir / "empty").string());
  CHECK(parse_descriptor(ea->get_metadata()).collections.empty());

  fs::remove_all(dir);
}

}  // TEST_SUITE
