#include <gtest/gtest.h>

#include "mat2gen/document.hpp"

using namespace mat2gen;
using Q = GaussRational;

namespace {
std::string error_of(std::string_view text) {
  try {
    parse_document(text);
  } catch (const document_error& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST(Document, CanonicalFloatText) {
  const TupleDocument d{FTuple{FMat::diag(1.0, -1.0), FMat{0.0, 1.0, 1.0, 0.0}}};
  EXPECT_EQ(serialize(d),
            R"({"scalar":"float64","r":2,"matrices":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]],)"
            R"([[[0.0,0.0],[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]]]})");
  EXPECT_EQ(d.backend(), Backend::floating);
  EXPECT_EQ(d.r(), 2u);
}

TEST(Document, NegativeZeroFolds) {
  const TupleDocument d{FTuple{FMat{Cplx(-0.0, -0.0), 0.0, 0.0, 0.0}}};
  EXPECT_EQ(serialize(d).find("-0"), std::string::npos);
}

TEST(Document, CanonicalExactText) {
  const TupleDocument d{QTuple{QMat{Q(mpq_class(1, 2), mpq_class(-3)), 0, 0, 1}}};
  EXPECT_EQ(serialize(d),
            R"({"scalar":"gaussian-rational","r":1,"matrices":[[[{"re":"1/2","im":"-3"},{"re":"0","im":"0"}],)"
            R"([{"re":"0","im":"0"},{"re":"1","im":"0"}]]]})");
}

TEST(Document, RoundTrip) {
  CounterRng rng(1, 0);
  for (int k = 0; k < 200; ++k) {
    const TupleDocument f{random_tuple(rng, 1 + k % 4)};
    const TupleDocument q{random_rational_tuple(rng, 1 + k % 4)};
    EXPECT_EQ(parse_document(serialize(f)), f);
    EXPECT_EQ(parse_document(serialize(q)), q);
    EXPECT_EQ(serialize(parse_document(serialize(f))), serialize(f));
  }
}

TEST(Document, AcceptsWhitespaceAndIntegers) {
  const TupleDocument d = parse_document(R"( { "r" : 1, "scalar":"float64",
      "matrices": [ [[[1,0],[2,0.5]],[[0,0],[1,0]]] ] } )");
  EXPECT_EQ(d, (TupleDocument{FTuple{FMat{1.0, Cplx(2.0, 0.5), 0.0, 1.0}}}));
}

TEST(Document, MalformedJsonHasPosition) {
  const std::string e = error_of("{\"scalar\": \"float64\",\n");
  EXPECT_NE(e.find("malformed JSON"), std::string::npos) << e;
  EXPECT_NE(e.find("line 2"), std::string::npos) << e;
  EXPECT_NE(error_of("{\"r\": 1,, }").find("column"), std::string::npos);
}

TEST(Document, SchemaErrorsNamePath) {
  const std::string m1 = R"([[[1,0],[0,0]],[[0,0],[1,0]]])";
  struct Case {
    std::string text, needle;
  };
  const std::vector<Case> cases{
      {"[]", "at /:"},
      {R"({"scalar":"float64","r":1})", "/matrices"},
      {R"({"scalar":"float32","r":1,"matrices":[)" + m1 + "]}", "/scalar"},
      {R"({"scalar":"float64","r":0,"matrices":[]})", "/r"},
      {R"({"scalar":"float64","r":1.5,"matrices":[)" + m1 + "]}", "/r"},
      {R"({"scalar":"float64","r":2,"matrices":[)" + m1 + "]}", "does not match r"},
      {R"({"scalar":"float64","r":1,"extra":0,"matrices":[)" + m1 + "]}", "/extra"},
      {R"({"scalar":"float64","r":1,"matrices":[[[[1,0],[0,0]],[[0,0]]]]})", "/matrices/0/1"},
      {R"({"scalar":"float64","r":1,"matrices":[[[[1,0],[0,0]],[[0,0],"x"]]]})", "/matrices/0/1/1"},
      {R"({"scalar":"float64","r":1,"matrices":[[[[1,0,0],[0,0]],[[0,0],[1,0]]]]})", "/matrices/0/0/0"},
      {R"({"scalar":"gaussian-rational","r":1,"matrices":[[[{"re":"1/0","im":"0"},{"re":"0","im":"0"}],[{"re":"0","im":"0"},{"re":"1","im":"0"}]]]})",
       "/matrices/0/0/0/re"},
      {R"({"scalar":"gaussian-rational","r":1,"matrices":[[[{"re":1,"im":"0"},{"re":"0","im":"0"}],[{"re":"0","im":"0"},{"re":"1","im":"0"}]]]})",
       "/matrices/0/0/0/re"},
      {R"({"scalar":"gaussian-rational","r":1,"matrices":[[[[1,0],{"re":"0","im":"0"}],[{"re":"0","im":"0"},{"re":"1","im":"0"}]]]})",
       "/matrices/0/0/0"},
  };
  for (const auto& c : cases) {
    const std::string e = error_of(c.text);
    EXPECT_NE(e.find(c.needle), std::string::npos) << c.text << " -> " << e;
  }
}
