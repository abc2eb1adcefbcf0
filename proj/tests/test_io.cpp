#include <gtest/gtest.h>

#include <fstream>

#include "kisin/io.hpp"
#include "kisin/line_solver.hpp"
#include "kisin/lubin_tate.hpp"

using namespace kisin;
using io::json;

namespace {

json load(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  return json::parse(in);
}

}  // namespace

TEST(Json, IntegerRoundTrip) {
  for (const Integer& z : {Integer(0), Integer(-17), Integer("123456789012345678901234567890")}) {
    const json j = io::integer_json(z);
    EXPECT_EQ(io::integer_from_json(json::parse(j.dump())), z);
  }
  EXPECT_TRUE(io::integer_json(Integer(5)).is_number_integer());
  EXPECT_TRUE(io::integer_json(ipow(2, 80)).is_string());
  EXPECT_THROW(io::integer_from_json(json(1.5)), InvalidInput);
}

TEST(Json, RationalRoundTrip) {
  const Rational r = make_rational(Integer(-6), ipow(3, 50));
  EXPECT_EQ(io::rational_from_json(json::parse(io::rational_json(r).dump())), r);
  EXPECT_EQ(io::rational_json(make_rational(2, 4)), (json{{"num", 1}, {"den", 2}}));
  EXPECT_THROW(io::rational_from_json(json{{"num", 1}}), InvalidInput);
}

TEST(Json, SeriesRoundTrip) {
  const FieldSpec F = make_field(3, 2);
  const auto s = TruncSeries::from_terms(F, {{0, Elem{4}}, {7, Elem{8}}}, 12);
  EXPECT_EQ(io::series_from_json(F, io::series_json(s)), s);
  json bad = io::series_json(s);
  bad["terms"][0][1] = 9;
  EXPECT_THROW(io::series_from_json(F, bad), InvalidInput);
}

TEST(Fixture, ModuleRoundTrip) {
  const auto m = ramified_frobenius_matrix(make_ramified_preset(3, 2), {1});
  const auto back = io::module_from_fixture(json::parse(io::fixture_json(m).dump()));
  EXPECT_EQ(back.rank(), m.rank());
  EXPECT_EQ(back.eisenstein_degree(), m.eisenstein_degree());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_EQ(back.frobenius()(i, j), m.frobenius()(i, j));
}

TEST(Fixture, HandWrittenDiagonal) {
  const auto m = io::module_from_fixture(load("diag_f2.json"));
  EXPECT_EQ(det_valuation(m).value(), 7);
  EXPECT_EQ(mu_set(enumerate_lines(m)), (std::set<std::int64_t>{2, 5}));
}

TEST(Fixture, StoredCyclicQuarticMatchesPreset) {
  const auto stored = io::module_from_fixture(load("cyclic_h4_p2.json"));
  const auto fresh = ramified_frobenius_matrix(make_ramified_preset(2, 4), standard_ramified_type(4));
  EXPECT_EQ(stored.eisenstein_degree(), 32);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(stored.frobenius()(i, j), fresh.frobenius()(i, j));
  EXPECT_EQ(submodule_valuations(stored, 3), (std::set<std::int64_t>{16, 24}));
}

TEST(Fixture, RejectsBadShape) {
  json j = load("diag_f2.json");
  j["h"] = 3;
  EXPECT_THROW(io::module_from_fixture(j), InvalidInput);
}

TEST(Descriptor, InertFixture) {
  const auto d = io::descriptor_from_json(load("inert_g1.json"));
  ASSERT_EQ(d.primes.size(), 1u);
  EXPECT_EQ(d.primes[0].f, 2);
  EXPECT_EQ(d.degree, 2);
  const auto b = general_delta_bound(d, 2, 3);
  EXPECT_EQ(b.coefficient, 1 - unram_bound(3, 2, 1, 1, 1));
  const json out = io::height_delta_json(b);
  EXPECT_EQ(out["qualifier"], "lower_bound");
  EXPECT_EQ(out["coefficient"], (json{{"num", 3}, {"den", 4}}));
}

TEST(Descriptor, RangeCarriesBounds) {
  const json j = io::height_delta_json(surface_delta(9, 5, balanced_kernel(1)));
  EXPECT_EQ(j["qualifier"], "range");
  EXPECT_EQ(j["min"], (json{{"num", 1}, {"den", 5}}));
  EXPECT_EQ(j["max"], (json{{"num", 31}, {"den", 125}}));
}
