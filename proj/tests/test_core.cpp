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

#include <doctest.h>

#include "common/support.hpp"
#include "xfed/decimal.hpp"
#include "xfed/path.hpp"
#include "xfed/predicate.hpp"
#include "xfed/xml.hpp"
#include "xfed/xtree.hpp"
#include "xfed/xtuple.hpp"

using namespace xfed;

TEST_SUITE("path") {
  TEST_CASE("parse and text round trip") {
    Path p = Path::parse("supplier/contact/phone");
    CHECK(p.text() == "supplier/contact/phone");
    CHECK(p.size() == 3);
    CHECK(p.root() == "supplier");
    CHECK(p.leaf() == "phone");
    CHECK(Path::parse(p.text()) == p);
  }

  TEST_CASE("prefix and parent") {
    Path p = Path::parse("a/b/c");
    CHECK(Path::parse("a").is_prefix_of(p));
    CHECK(Path::parse("a/b").is_prefix_of(p));
    CHECK(p.is_prefix_of(p));
    CHECK_FALSE(Path::parse("a/c").is_prefix_of(p));
    CHECK(p.parent().text() == "a/b");
    CHECK(Path::parse("a/b").child("c") == p);
    CHECK(p.with_root("z").text() == "z/b/c");
  }

  TEST_CASE("joker matches exactly one step") {
    Path pat = Path::parse("supplier/*/phone");
    CHECK(pat.has_joker());
    CHECK(pat.matches(Path::parse("supplier/contact/phone")));
    CHECK_FALSE(pat.matches(Path::parse("supplier/phone")));
    CHECK_FALSE(pat.matches(Path::parse("supplier/contact/localisation/phone")));
    CHECK_FALSE(Path::parse("a/b").has_joker());
  }

  TEST_CASE("invalid steps rejected") {
    CHECK_THROWS_AS((void)Path::parse(""), std::invalid_argument);
    CHECK_THROWS_AS((void)Path::parse("a//b"), std::invalid_argument);
    CHECK_THROWS_AS((void)Path::parse("1a"), std::invalid_argument);
    CHECK_THROWS_AS((void)Path::parse("a/b c"), std::invalid_argument);
    CHECK(is_valid_step("a-b_7"));
    CHECK_FALSE(is_valid_step("-x"));
  }
}

TEST_SUITE("decimal") {
  TEST_CASE("parse and canonical form") {
    CHECK(Decimal::parse("45")->to_string() == "45");
    CHECK(Decimal::parse("045.50")->to_string() == "45.5");
    CHECK(Decimal::parse("-0.0")->to_string() == "0");
    CHECK(Decimal::parse("+12.25")->to_string() == "12.25");
    CHECK_FALSE(Decimal::parse("").has_value());
    CHECK_FALSE(Decimal::parse(".").has_value());
    CHECK_FALSE(Decimal::parse("1e5").has_value());
    CHECK_FALSE(Decimal::parse("12,5").has_value());
    CHECK_FALSE(Decimal::parse("1234567890123456789012345678901").has_value());
    CHECK(Decimal::is_canonical("45.5"));
    CHECK_FALSE(Decimal::is_canonical("45.50"));
    CHECK_FALSE(Decimal::is_canonical("+45"));
  }

  TEST_CASE("compare aligns scales") {
    CHECK(Decimal::parse("5")->compare(*Decimal::parse("5.0")) == 0);
    CHECK(Decimal::parse("4.5")->compare(*Decimal::parse("45")) < 0);
    CHECK(Decimal::parse("-2")->compare(*Decimal::parse("1")) < 0);
    CHECK(Decimal::parse("10")->compare(*Decimal::parse("9.99")) > 0);
  }

  TEST_CASE("plus and divided_by against the scaled-integer oracle") {
    using test::oracle::Num;
    const char* vals[] = {"1.5", "2.25", "-0.75", "1000", "0.333", "45"};
    Decimal sum = Decimal::from_int(0);
    Num osum;
    for (const char* v : vals) {
      sum = sum.plus(*Decimal::parse(v));
      osum = test::oracle::add(osum, *test::oracle::parse(v));
    }
    CHECK(sum.to_string() == test::oracle::to_string(osum));
    Decimal avg = sum.divided_by(Decimal::from_int(6));
    CHECK(avg.to_string() ==
          test::oracle::to_string(test::oracle::div(osum, 6)));
  }

  TEST_CASE("divided_by terminates exactly or rounds half up at 12") {
    CHECK(Decimal::parse("1")->divided_by(*Decimal::parse("4")).to_string() ==
          "0.25");
    CHECK(Decimal::parse("1")->divided_by(*Decimal::parse("3")).to_string() ==
          "0.333333333333");
    CHECK(Decimal::parse("2")->divided_by(*Decimal::parse("3")).to_string() ==
          "0.666666666667");
    CHECK(Decimal::parse("-1")->divided_by(*Decimal::parse("8")).to_string() ==
          "-0.125");
  }
}

TEST_SUITE("xtree") {
  TEST_CASE("build, paths, find, string value") {
    XTree t("supplier");
    NodeId id = t.add_child(t.root(), "id");
    NodeId sk = t.add_child(id, "suppkey");
    t.set_text(sk, "7");
    NodeId contact = t.add_child(t.root(), "contact");
    NodeId ph = t.add_child(contact, "phone");
    t.set_text(ph, "555-01");
    CHECK(t.path_of(sk).text() == "supplier/id/suppkey");
    CHECK(t.find(Path::parse("supplier/contact/phone")) ==
          std::vector<NodeId>{ph});
    CHECK(t.find(Path::parse("supplier/nope")).empty());
    CHECK(t.string_value(t.root()) == "7555-01");
    CHECK(t.serialize() ==
          "<supplier><id><suppkey>7</suppkey></id>"
          "<contact><phone>555-01</phone></contact></supplier>");
  }

  TEST_CASE("serialization escapes markup characters") {
    XTree t("c");
    t.set_text(t.root(), "a<b&c>d");
    CHECK(t.serialize() == "<c>a&lt;b&amp;c&gt;d</c>");
  }
}

TEST_SUITE("xml") {
  TEST_CASE("document parse round trip") {
    std::string text =
        "<?xml version=\"1.0\"?>\n<!-- note -->\n"
        "<personne><prenom>Lea</prenom><nom>Brun</nom></personne>"
        "<livre><date>1998</date></livre>";
    std::vector<XTreePtr> forest = parse_document(text);
    REQUIRE(forest.size() == 2);
    CHECK(serialize_forest(forest) ==
          "<personne><prenom>Lea</prenom><nom>Brun</nom></personne>"
          "<livre><date>1998</date></livre>");
  }

  TEST_CASE("self closing tags and attributes are tolerated") {
    std::vector<XTreePtr> forest =
        parse_document("<r kind=\"x\"><a/><b>1</b></r>");
    REQUIRE(forest.size() == 1);
    CHECK(forest[0]->serialize() == "<r><a></a><b>1</b></r>");
  }

  TEST_CASE("entities unescape and bad input throws") {
    CHECK(xml_unescape("a&lt;&amp;&gt;&quot;&apos;b") == "a<&>\"'b");
    CHECK_THROWS_AS((void)xml_unescape("bad &unknown; ref"), StreamError);
    CHECK_THROWS_AS((void)parse_document("<a><b></a>"), StreamError);
    CHECK_THROWS_AS((void)parse_document("<a>unterminated"), StreamError);
  }

  TEST_CASE("boundary after every top level element") {
    XmlEventStream s("<a>1</a><b>2</b>");
    std::vector<Event::Kind> kinds;
    for (;;) {
      Event e = s.next();
      kinds.push_back(e.kind);
      if (e.kind == Event::Kind::End || e.kind == Event::Kind::Error) break;
    }
    CHECK(kinds == std::vector<Event::Kind>{
                       Event::Kind::Open, Event::Kind::Text, Event::Kind::Close,
                       Event::Kind::Boundary, Event::Kind::Open,
                       Event::Kind::Text, Event::Kind::Close,
                       Event::Kind::Boundary, Event::Kind::End});
  }
}

TEST_SUITE("xtuple") {
  TEST_CASE("make_guide closes prefixes") {
    DataguidePtr g = make_guide({Path::parse("a/b/c"), Path::parse("a/d")});
    CHECK(g->size() == 4);
    CHECK(g->count(Path::parse("a")) == 1);
    CHECK(g->count(Path::parse("a/b")) == 1);
    CHECK(guide_is_prefix_closed(*g));
  }

  TEST_CASE("canonical keys separate attribute and value boundaries") {
    XRelation r = test::rel_forest({"<a><k>x</k><m>y</m></a>",
                                    "<a><k>xy</k></a>",
                                    "<a><k>x</k><m>y</m></a>"},
                                   {"a/k", "a/m"});
    auto ks = test::keys_in_order(r);
    CHECK(ks[0] == ks[2]);
    CHECK(ks[0] != ks[1]);
  }

  TEST_CASE("validator accepts built relations and reports violations") {
    XRelation r = test::rel_forest({"<a><k>1</k></a>"}, {"a/k"});
    CHECK(test::violations(r) == 0);

    XRelation broken = r;
    broken.tuples[0].bindings[0][0].node = 99;  // out of range
    CHECK(validate_relation(broken).size() > 0);

    XRelation off_guide = r;
    off_guide.schema.guide = make_guide({Path::parse("a")});
    CHECK(validate_relation(off_guide).size() > 0);
  }

  TEST_CASE("multi valued attributes keep document order") {
    XRelation r =
        test::rel_forest({"<a><k>1</k><k>2</k></a>"}, {"a/k"});
    REQUIRE(r.tuples[0].refs(0).size() == 2);
    std::string v = canonical_attr_value(r.schema, r.tuples[0], 0);
    CHECK(v.find("<k>1</k>") < v.find("<k>2</k>"));
  }
}

TEST_SUITE("predicate") {
  XRelation sample() {
    return test::rel_forest(
        {"<s><k>45</k><name>ann</name></s>", "<s><k>7</k><name>bob</name></s>",
         "<s><name>eve</name></s>", "<s><k>oak</k><name>kim</name></s>"},
        {"s/k", "s/name"});
  }

  bool keep(const XRelation& r, std::size_t i, const PredicatePtr& p,
            Diagnostics* d = nullptr) {
    return eval_predicate(*p, r.schema, r.tuples[i], d);
  }

  TEST_CASE("comparisons use decimal order when both sides parse") {
    XRelation r = sample();
    auto p = Predicate::cmp(Path::parse("s/k"), CmpOp::Gt,
                            Constant::decimal("10"));
    CHECK(keep(r, 0, p));
    CHECK_FALSE(keep(r, 1, p));
    auto eq = Predicate::cmp(Path::parse("s/k"), CmpOp::Eq,
                             Constant::decimal("45.0"));
    CHECK(keep(r, 0, eq));
  }

  TEST_CASE("absent attribute never satisfies an atom") {
    XRelation r = sample();
    auto p = Predicate::cmp(Path::parse("s/k"), CmpOp::Eq,
                            Constant::string("oak"));
    CHECK_FALSE(keep(r, 2, p));
    CHECK(keep(r, 3, p));
  }

  TEST_CASE("non numeric value under an ordering atom counts a diagnostic") {
    XRelation r = sample();
    Diagnostics d;
    auto p = Predicate::cmp(Path::parse("s/k"), CmpOp::Lt,
                            Constant::decimal("100"));
    CHECK_FALSE(keep(r, 3, p, &d));
    CHECK(d.non_numeric_under_numeric_cmp == 1);
    CHECK(keep(r, 1, p, &d));
  }

  TEST_CASE("contains and in_set") {
    XRelation r = sample();
    CHECK(keep(r, 0, Predicate::contains(Path::parse("s/name"), "nn")));
    CHECK_FALSE(keep(r, 1, Predicate::contains(Path::parse("s/name"), "nn")));
    auto in = Predicate::in_set(Path::parse("s/k"), {"7", "8"});
    CHECK(keep(r, 1, in));
    CHECK_FALSE(keep(r, 0, in));
  }

  TEST_CASE("boolean connectives") {
    XRelation r = sample();
    auto a = Predicate::cmp(Path::parse("s/k"), CmpOp::Eq, Constant::decimal("45"));
    auto b = Predicate::contains(Path::parse("s/name"), "bob");
    CHECK(keep(r, 0, Predicate::disj({a, b})));
    CHECK(keep(r, 1, Predicate::disj({a, b})));
    CHECK_FALSE(keep(r, 1, Predicate::conj({a, b})));
    CHECK(keep(r, 0, Predicate::negate(b)));
  }

  TEST_CASE("render uses variable names per root") {
    auto p = Predicate::conj(
        {Predicate::cmp_attrs(Path::parse("supplier/id/suppkey"), CmpOp::Eq,
                              Path::parse("partsupp/suppkey")),
         Predicate::cmp(Path::parse("partsupp/availqty"), CmpOp::Gt,
                        Constant::decimal("45")),
         Predicate::contains(Path::parse("nation/comment"), "iron")});
    std::map<std::string, std::string> vars = {
        {"supplier", "s"}, {"partsupp", "ps"}, {"nation", "n"}};
    CHECK(p->render(vars) ==
          "$s/id/suppkey = $ps/suppkey and $ps/availqty > 45 and "
          "contains($n/comment, \"iron\")");
  }

  TEST_CASE("compare_values falls back to bytes") {
    CHECK(compare_values("5", "5.0") == 0);
    CHECK(compare_values("4.5", "45") < 0);
    CHECK(compare_values("oak", "ash") > 0);
    CHECK(compare_values("5", "oak") != 0);
  }
}
