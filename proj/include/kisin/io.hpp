#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kisin/errors.hpp"
#include "kisin/heights.hpp"
#include "kisin/kisin_module.hpp"
#include "kisin/rational.hpp"
#include "kisin/series.hpp"

namespace kisin::io {

using json = nlohmann::json;

// machine-sized integers stay numbers, anything larger becomes a decimal string
inline json integer_json(const Integer& z) {
  if (z.fits_slong_p()) return json(z.get_si());
  return json(z.get_str());
}

inline Integer integer_from_json(const json& j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) return Integer(j.get<std::string>());
  throw InvalidInput("expected an integer");
}

inline json rational_json(const Rational& r) {
  return json{{"num", integer_json(r.get_num())}, {"den", integer_json(r.get_den())}};
}

inline Rational rational_from_json(const json& j) {
  if (!j.is_object() || !j.contains("num") || !j.contains("den")) throw InvalidInput("expected {num, den}");
  return make_rational(integer_from_json(j.at("num")), integer_from_json(j.at("den")));
}

// Sparse series: {precision, terms: [[degree, coefficient], ...]}; coefficients use the
// base-p digit encoding of the field.
inline json series_json(const TruncSeries& s) {
  json terms = json::array();
  for (auto [d, c] : s.terms()) terms.push_back(json::array({d, c.v}));
  return json{{"precision", s.precision()}, {"terms", terms}};
}

inline TruncSeries series_from_json(const FieldSpec& F, const json& j) {
  const std::int64_t prec = j.at("precision").get<std::int64_t>();
  std::vector<std::pair<std::int64_t, Elem>> terms;
  for (const auto& t : j.at("terms")) {
    const auto c = t.at(1).get<std::uint64_t>();
    if (c >= F.q()) throw InvalidInput("series: coefficient out of range");
    terms.emplace_back(t.at(0).get<std::int64_t>(), Elem{static_cast<std::uint32_t>(c)});
  }
  return TruncSeries::from_terms(F, terms, prec);
}

inline json fixture_json(const FiniteKisinModule& m) {
  json rows = json::array();
  for (int i = 0; i < m.rank(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.rank(); ++j) row.push_back(series_json(m.frobenius()(i, j)));
    rows.push_back(row);
  }
  return json{{"p", m.field().p()},       {"f", m.field().f()},         {"e", m.eisenstein_degree()},
              {"h", m.rank()},            {"precision", m.precision()}, {"entries", rows}};
}

inline FiniteKisinModule module_from_fixture(const json& j) {
  const auto p = j.at("p").get<std::uint64_t>();
  const int f = j.at("f").get<int>();
  const int h = j.at("h").get<int>();
  const auto prec = j.at("precision").get<std::int64_t>();
  const FieldSpec F = make_field(p, f);
  const auto& rows = j.at("entries");
  if (!rows.is_array() || static_cast<int>(rows.size()) != h) throw InvalidInput("fixture: entries must have h rows");
  SeriesMatrix A(F, h, h, prec);
  for (int i = 0; i < h; ++i) {
    if (static_cast<int>(rows[i].size()) != h) throw InvalidInput("fixture: entries must be h x h");
    for (int k = 0; k < h; ++k) A(i, k) = series_from_json(F, rows[i][k]).with_precision(prec);
  }
  return FiniteKisinModule(std::move(A), j.at("e").get<std::int64_t>());
}

inline json height_delta_json(const HeightDelta& d) {
  json j{{"coefficient", rational_json(d.coefficient)}, {"prime", d.prime}, {"qualifier", qualifier_name(d.qualifier)}};
  if (d.qualifier == HeightDelta::Qualifier::Range) {
    j["min"] = rational_json(d.range_min);
    j["max"] = rational_json(d.range_max);
  }
  return j;
}

inline GeneralDescriptor descriptor_from_json(const json& j) {
  GeneralDescriptor d;
  if (j.contains("degree")) d.degree = j.at("degree").get<int>();
  for (const auto& q : j.at("primes")) {
    PrimeDescriptor pd;
    pd.nu = q.value("nu", 1);
    pd.f = q.value("f", 1);
    pd.ramified_in_cm = q.value("ramified", false);
    pd.rho = q.value("rho", 1);
    pd.h = q.value("h", 1);
    pd.d = q.value("d", 0);
    pd.n = q.value("n", 0);
    pd.k = q.value("k", 0);
    d.primes.push_back(pd);
  }
  return d;
}

}  // namespace kisin::io
