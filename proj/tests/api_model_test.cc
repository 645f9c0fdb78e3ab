// Copyright 2026 The Duofuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "duofuzz/api_model.h"

#include "gtest/gtest.h"
#include "test_util.h"

namespace duofuzz {
namespace {

TEST(NormalizeTypeTest, StripsQualifiersAndCountsPointers) {
  EXPECT_EQ(NormalizeType("const char *"), (TypeName{"char", 1}));
  EXPECT_EQ(NormalizeType("struct KvHandle **"), (TypeName{"KvHandle", 2}));
  EXPECT_EQ(NormalizeType("int"), (TypeName{"int", 0}));
  EXPECT_EQ(NormalizeType("unsigned   long"), (TypeName{"unsigned long", 0}));
  EXPECT_EQ(NormalizeType("const std::string &"), (TypeName{"std::string", 0}));
  EXPECT_EQ(NormalizeType("char * const"), (TypeName{"char", 1}));
}

TEST(NormalizeTypeTest, ArraysDecayToPointers) {
  EXPECT_EQ(NormalizeType("uint8_t[16]"), (TypeName{"uint8_t", 1}));
}

TEST(NormalizeTypeTest, TemplateArgumentsKeepTheirPointers) {
  const TypeName t = NormalizeType("std::vector< int * >");
  EXPECT_EQ(t.pointer_depth, 0);
  EXPECT_EQ(NormalizeType(t.ToString()), t);
}

TEST(NormalizeTypeTest, RoundTripsThroughToString) {
  for (const char* raw : {"const char *", "Foo**", "void", "struct X *"}) {
    const TypeName t = NormalizeType(raw);
    EXPECT_EQ(NormalizeType(t.ToString()), t) << raw;
  }
}

TEST(NormalizeTypeTest, RejectsEmpty) {
  EXPECT_THROW(NormalizeType(""), MalformedTypeError);
  EXPECT_THROW(NormalizeType("const"), MalformedTypeError);
}

TEST(TypesMatchTest, VoidNeverMatches) {
  const TypeName v = NormalizeType("void");
  EXPECT_FALSE(TypesMatch(v, v, false));
  EXPECT_FALSE(TypesMatch(v, v, true));
}

TEST(TypesMatchTest, LooseIgnoresDepth) {
  const TypeName a = NormalizeType("Foo *");
  const TypeName b = NormalizeType("Foo");
  EXPECT_FALSE(TypesMatch(a, b, false));
  EXPECT_TRUE(TypesMatch(a, b, true));
}

TEST(ApiGroupTest, SortsMembers) {
  ApiGroup g({"b", "a", "c"});
  EXPECT_EQ(g.members(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(g.Key(), "a,b,c");
  EXPECT_EQ(g, ApiGroup({"c", "a", "b"}));
  EXPECT_TRUE(g.Contains("b"));
  EXPECT_FALSE(g.Contains("d"));
}

TEST(ApiGroupTest, RejectsDuplicates) {
  EXPECT_THROW(ApiGroup({"a", "a"}), std::invalid_argument);
  EXPECT_THROW(ApiGroup({""}), std::invalid_argument);
}

TEST(LoadLibrarySpecTest, LoadsKvFixture) {
  const LibrarySpec spec =
      LoadLibrarySpecFile((testing::DataDir() / "kv" / "kv.json").string());
  EXPECT_EQ(spec.library_name, "kv");
  EXPECT_EQ(spec.apis.size(), 9u);
  ASSERT_NE(spec.Find("kv_put"), nullptr);
  EXPECT_EQ(spec.Find("kv_put")->parameters[0].type, (TypeName{"KvHandle", 1}));
  EXPECT_EQ(spec.implicit.size(), 2u);
  ASSERT_TRUE(spec.source_root.has_value());
  EXPECT_TRUE(std::filesystem::exists(*spec.source_root + "/kv.h"));
}

TEST(LoadLibrarySpecTest, RoundTrip) {
  const LibrarySpec spec =
      LoadLibrarySpecFile((testing::DataDir() / "kv" / "kv.json").string());
  EXPECT_EQ(LoadLibrarySpec(SaveLibrarySpec(spec)), spec);
}

TEST(LoadLibrarySpecTest, SchemaErrorsCarryPaths) {
  try {
    LoadLibrarySpec(R"({"library": "x", "apis": [{"name": "f"}]})");
    FAIL() << "expected SpecError";
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("$.apis[0]"), std::string::npos)
        << e.what();
  }
  EXPECT_THROW(LoadLibrarySpec("{"), SpecError);
}

TEST(LoadLibrarySpecTest, AnonymousParametersGetNames) {
  const LibrarySpec spec = LoadLibrarySpec(R"json({
    "library": "x",
    "apis": [{"name": "f", "signature": "int f(int)", "return_type": "int",
              "params": [{"type": "int"}]}]})json");
  EXPECT_EQ(spec.apis[0].parameters[0].name, "arg0");
}

TEST(ValidateSpecTest, ReportsViolations) {
  LibrarySpec spec;
  spec.library_name = "x";
  spec.apis.push_back(testing::MakeApi("f", "int", {}));
  spec.apis.push_back(testing::MakeApi("f", "int", {}));
  spec.implicit.push_back({ConstraintKind::kImply, "f", "f"});
  spec.implicit.push_back({ConstraintKind::kConflict, "f", "ghost"});
  const auto v = ValidateSpec(spec);
  auto has = [&](const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) {
      return s.find(needle) != std::string::npos;
    });
  };
  EXPECT_TRUE(has("duplicate api: f"));
  EXPECT_TRUE(has("identical endpoints"));
  EXPECT_TRUE(has("unknown api: ghost"));
}

TEST(ValidateGroupTest, ChecksSizeAndNames) {
  LibrarySpec spec;
  for (const char* n : {"a", "b", "c"}) {
    spec.apis.push_back(testing::MakeApi(n, "int", {"int"}));
  }
  EXPECT_TRUE(ValidateGroup(ApiGroup({"a", "b"}), spec).empty());
  EXPECT_FALSE(ValidateGroup(ApiGroup({"a"}), spec).empty());
  EXPECT_FALSE(ValidateGroup(ApiGroup({"a", "zz"}), spec).empty());
  EXPECT_FALSE(ValidateGroup(ApiGroup({"a", "b", "c"}), spec, 2).empty());
}

}  // namespace
}  // namespace duofuzz
