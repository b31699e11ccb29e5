#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "bic/catalog.hpp"
#include "bic/config.hpp"
#include "bic/mapfile.hpp"
#include "bic/sweep.hpp"
#include "bic/toymodels.hpp"

using namespace bic;

namespace {

SweepSpec twolevel_spec(int n1 = 5, int n2 = 4) {
  SweepSpec s;
  s.model = "twolevel";
  s.params = {{"gamma1", 0.2}, {"gamma2", 0.05}, {"u", 0.3}};
  s.axis1 = {"eps", -1.0, 1.0, n1};
  s.axis2 = {"E", -1.5, 1.5, n2};
  return s;
}

bool same_double(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(MapFile, NumbersRoundTripBitwise) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng) * std::pow(10.0, std::round(60.0 * u(rng)));
    EXPECT_TRUE(same_double(parse_number(format_number(x)), x)) << format_number(x);
  }
  for (double x : {0.0, -0.0, 5e-324, std::numeric_limits<double>::max()})
    EXPECT_TRUE(same_double(parse_number(format_number(x)), x));
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_TRUE(std::isnan(parse_number("nan")));
  EXPECT_EQ(parse_number(format_number(-INFINITY)), -INFINITY);
  EXPECT_THROW(parse_number("1.0x"), std::exception);
}

TEST(MapFile, AxisEndpointsExact) {
  const MapAxis a{"x", 0.1, 0.7, 7};
  EXPECT_EQ(a.at(0), 0.1);
  EXPECT_EQ(a.at(6), 0.7);
  EXPECT_THROW((MapAxis{"x", 0.0, 1.0, 1}.at(0)), std::invalid_argument);
}

TEST(MapFile, WriteReadRoundTrip) {
  const auto r = run_sweep(twolevel_spec());
  std::stringstream ss;
  write_map(ss, r.map);
  const auto back = read_map(ss);
  EXPECT_TRUE(same_bits(r.map, back));
  EXPECT_EQ(back.model, "twolevel");
  EXPECT_EQ(back.version, kToolVersion);
  ASSERT_EQ(back.axes.size(), 2u);
  EXPECT_EQ(back.axes[1].count, 4);
  std::stringstream again;
  write_map(again, back);
  std::stringstream first;
  write_map(first, r.map);
  EXPECT_EQ(first.str(), again.str());
}

TEST(MapFile, RejectsWrongRowCount) {
  auto m = run_sweep(twolevel_spec()).map;
  m.rows.pop_back();
  std::stringstream ss;
  write_map(ss, m);
  EXPECT_THROW(read_map(ss), std::exception);
}

TEST(Sweep, RowMajorWithAxis1Outer) {
  const auto spec = twolevel_spec(3, 4);
  const auto r = run_sweep(spec);
  ASSERT_EQ(r.map.rows.size(), 12u);
  EXPECT_EQ(r.map.columns, (std::vector<std::string>{"eps", "E", "T", "R", "width_min"}));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) {
      const auto& row = r.map.rows[i * 4 + j];
      EXPECT_EQ(row[0], spec.axis1.at(i));
      EXPECT_EQ(row[1], spec.axis2.at(j));
      EXPECT_NEAR(row[2] + row[3], 1.0, 1e-12);  // T + R for the lossless two-port
    }
}

TEST(Sweep, DegenerateAxisRepeatsRows) {
  auto spec = twolevel_spec(2, 3);
  spec.axis1 = {"eps", 0.4, 0.4, 2};
  const auto r = run_sweep(spec);
  ASSERT_EQ(r.map.rows.size(), 6u);
  for (int j = 0; j < 3; ++j)
    for (std::size_t c = 0; c < r.map.columns.size(); ++c)
      EXPECT_TRUE(same_double(r.map.rows[j][c], r.map.rows[3 + j][c]));
}

TEST(Sweep, ThreadCountDoesNotChangeBits) {
  for (const char* model : {"twolevel", "abring", "zeeman"}) {
    SweepSpec s = with_default_axes({model, {}, {}, {}, {}, 1});
    s.axis1.count = 7;
    s.axis2.count = 6;
    const auto a = run_sweep(s);
    s.threads = 3;
    const auto b = run_sweep(s);
    EXPECT_TRUE(same_bits(a.map, b.map)) << model;
  }
}

TEST(Sweep, FailedPointIsNaNWithDiagnostic) {
  auto spec = twolevel_spec(3, 2);
  spec.axis1 = {"gamma1", -0.1, 0.1, 3};
  const auto r = run_sweep(spec);
  EXPECT_EQ(r.failures, 2);
  ASSERT_EQ(r.diagnostics.size(), 2u);
  EXPECT_NE(r.diagnostics[0].find("gamma1"), std::string::npos);
  EXPECT_TRUE(std::isnan(r.map.rows[0][2]));
  EXPECT_EQ(r.map.rows[0][0], -0.1);  // axis values stay
  EXPECT_TRUE(std::isfinite(r.map.rows[4][2]));
}

TEST(Sweep, UsageErrorsListValidNames) {
  try {
    model_info("nosuch");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("twolevel"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("sphere"), std::string::npos);
  }
  auto spec = twolevel_spec();
  spec.params["bogus"] = 1.0;
  try {
    resolve_params(spec);
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("gamma2"), std::string::npos);
  }
  spec = twolevel_spec();
  spec.axis2 = {"eps", 0, 1, 3};
  EXPECT_THROW(validate(spec), UsageError);
  spec = twolevel_spec();
  spec.axis2.count = 1;
  EXPECT_THROW(validate(spec), UsageError);
  spec = twolevel_spec();
  spec.threads = 0;
  EXPECT_THROW(validate(spec), UsageError);
  EXPECT_EQ(model_names().size(), 9u);
}

TEST(Sweep, ParallelForCoversAllAndRethrows) {
  std::vector<int> hit(50, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 5) throw std::runtime_error("x"); }), std::runtime_error);
}

TEST(Sweep, ResonanceScanTwoBranches) {
  auto spec = twolevel_spec(5, 2);
  spec.axis2 = {"E", -3.0, 3.0, 2};
  const auto r = resonance_scan(spec);
  EXPECT_EQ(r.map.kind, "resonances");
  ASSERT_EQ(r.map.rows.size(), 10u);
  for (const auto& row : r.map.rows) {
    EXPECT_GE(row[3], -1e-12);
    EXPECT_EQ(row[7], 1.0);
  }
}

TEST(Config, ParsesSectionsAndComments) {
  std::istringstream is("threads = 2\n# comment\n[planar]\n Ly = 4.5 ; trailing\ntol_width=1e-9\n\n[cyl]\nL = 5\n");
  const auto c = Config::parse(is, "t.ini");
  EXPECT_EQ(c.get("planar", "Ly"), "4.5");
  EXPECT_EQ(c.get("planar", "threads"), "2");
  EXPECT_EQ(c.number("planar", "tol_width"), 1e-9);
  EXPECT_FALSE(c.get("cyl", "Ly").has_value());
  EXPECT_EQ(c.merged("cyl").size(), 2u);
}

TEST(Config, ReportsLocation) {
  std::istringstream is("[a]\nkey value\n");
  try {
    Config::parse(is, "bad.ini");
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("bad.ini:2"), std::string::npos);
  }
}

TEST(Catalog, TwoLevelRecordRoundTrip) {
  const auto spec = twolevel_spec();
  const auto cat = build_catalog(spec);
  ASSERT_EQ(cat.records.size(), 1u);
  const auto& rec = cat.records[0];
  EXPECT_EQ(rec.kind, BICClass::FW);
  EXPECT_LE(rec.width, 1e-12);
  const auto bp = twolevel_bic_point(0.2, 0.05, 0.3);
  EXPECT_NEAR(rec.omega2, bp->energy, 1e-12);
  std::stringstream ss;
  write_catalog(ss, cat);
  const auto back = read_catalog(ss);
  ASSERT_EQ(back.records.size(), 1u);
  EXPECT_TRUE(same_double(back.records[0].omega2, rec.omega2));
  EXPECT_EQ(back.records[0].top.size(), rec.top.size());
  EXPECT_EQ(back.records[0].top[0].label, rec.top[0].label);
  EXPECT_EQ(back.point_names, cat.point_names);
  std::stringstream again;
  write_catalog(again, back);
  std::stringstream first;
  write_catalog(first, cat);
  EXPECT_EQ(first.str(), again.str());
}

TEST(Catalog, ClassNames) {
  for (auto k : {BICClass::Protected, BICClass::FW, BICClass::Accidental, BICClass::FabryPerot})
    EXPECT_EQ(parse_class(to_string(k)), k);
  EXPECT_THROW(parse_class("other"), std::exception);
}

TEST(Catalog, WellHasNoRecords) {
  const auto cat = build_catalog(with_default_axes({"well", {}, {}, {}, {}, 1}));
  EXPECT_TRUE(cat.records.empty());
  EXPECT_FALSE(cat.notes.empty());
}

TEST(Catalog, RingRecordsAtGridPoints) {
  auto spec = with_default_axes({"abring", {{"mmax", 1}}, {}, {}, {}, 1});
  const auto cat = build_catalog(spec);
  ASSERT_EQ(cat.records.size(), 1u);
  EXPECT_EQ(cat.records[0].kind, BICClass::Accidental);
  EXPECT_NEAR(cat.records[0].point[0], 2.0 * std::numbers::pi, 1e-12);
}

TEST(Field, ZeroRecordIndexOutOfRange) {
  const auto spec = twolevel_spec();
  const auto cat = build_catalog(spec);
  EXPECT_THROW(render_field(spec, cat, 3), UsageError);
  const auto f = render_field(spec, cat, 0);
  EXPECT_EQ(f.kind, "field");
  double norm = 0.0;
  for (const auto& row : f.rows) norm += row.back();
  EXPECT_NEAR(norm, 1.0, 1e-12);
}

TEST(Field, MapLayout) {
  MatC v(2, 3);
  v << 1, 2, 3, 4, 5, 6;
  const auto m = field_map("x", "a", "b", {0, 1, 2}, {0, 1}, v);
  ASSERT_EQ(m.rows.size(), 6u);
  EXPECT_EQ(m.rows[1][0], 0.0);
  EXPECT_EQ(m.rows[1][1], 1.0);
  EXPECT_EQ(m.rows[1][2], 4.0);
  EXPECT_EQ(m.rows[1][3], 16.0);
  EXPECT_THROW(field_map("x", "a", "b", {0}, {0, 1}, MatC::Zero(2, 1)), UsageError);
}
