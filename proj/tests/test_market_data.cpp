#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "spectranet/errors.hpp"
#include "spectranet/market_data.hpp"

using namespace spectranet;

namespace {

std::vector<PriceSeries> parse(const std::string& csv) {
  std::istringstream in(csv);
  return load_prices(in);
}

PriceSeries series(std::string ticker, std::vector<std::string> dates, std::vector<double> prices) {
  PriceSeries s{std::move(ticker), {}, std::move(prices)};
  for (const auto& d : dates) s.dates.push_back(Date::parse(d));
  return s;
}

}  // namespace

TEST(Date, ParsesIsoOnly) {
  EXPECT_EQ(Date::parse("2006-12-29").to_string(), "2006-12-29");
  EXPECT_LT(Date::parse("1992-01-02"), Date::parse("1992-01-03"));
  EXPECT_THROW(Date::parse("2006/12/29"), InputError);
  EXPECT_THROW(Date::parse("12/29/2006"), InputError);
  EXPECT_THROW(Date::parse("2006-02-30"), InputError);
  EXPECT_THROW(Date::parse("2006-1-05"), InputError);
}

TEST(LoadPrices, ThreeColumnFile) {
  const auto s = parse(
      "date,AAA,BBB\n"
      "2020-01-01,10,20\n2020-01-02,11,21\n2020-01-03,12,22\n2020-01-06,13,23\n2020-01-07,14,24\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].ticker, "AAA");
  EXPECT_EQ(s[0].prices.size(), 5u);
  EXPECT_EQ(s[1].prices.size(), 5u);
  EXPECT_DOUBLE_EQ(s[1].prices[4], 24.0);
}

TEST(LoadPrices, ZeroPriceNamesTickerAndDate) {
  try {
    parse("date,AAA,BBB\n2020-01-01,10,20\n2020-01-02,0,21\n2020-01-03,12,22\n");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("AAA"), std::string::npos) << msg;
    EXPECT_NE(msg.find("2020-01-02"), std::string::npos) << msg;
  }
}

TEST(LoadPrices, ColumnOrderDoesNotMatter) {
  const auto a = parse("date,AAA,BBB\n2020-01-01,10,20\n2020-01-02,11,21\n");
  const auto b = parse("date,BBB,AAA\n2020-01-01,20,10\n2020-01-02,21,11\n");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].ticker, b[i].ticker);
    EXPECT_EQ(a[i].dates, b[i].dates);
    EXPECT_EQ(a[i].prices, b[i].prices);
  }
}

TEST(LoadPrices, ErrorPaths) {
  EXPECT_THROW(load_prices(std::filesystem::path("/nonexistent/prices.csv")), InputError);
  EXPECT_THROW(parse("day,AAA\n2020-01-01,1\n2020-01-02,2\n"), InputError);
  EXPECT_THROW(parse("date\n2020-01-01\n"), InputError);
  EXPECT_THROW(parse("date,AAA,BBB\n2020-01-01,1,\n2020-01-02,2,\n"), InputError);
  EXPECT_THROW(parse("date,AAA\nnot-a-date,1\n2020-01-02,2\n"), InputError);
  EXPECT_THROW(parse("date,AAA\n2020-01-01,abc\n2020-01-02,2\n"), InputError);
  EXPECT_THROW(parse("date,AAA\n2020-01-01,-3\n2020-01-02,2\n"), InputError);
}

TEST(LoadPrices, ShortTickerListedInError) {
  try {
    parse("date,AAA,BBB\n2020-01-01,1,\n2020-01-02,2,\n2020-01-03,3,\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("BBB"), std::string::npos);
  }
}

TEST(LoadPrices, EmptyCellsAreMissingAndRowsAreSorted) {
  const auto s = parse("date,AAA,BBB\n2020-01-03,3,30\n2020-01-01,1,\n2020-01-02,2,20\n");
  EXPECT_EQ(s[0].dates.size(), 3u);
  EXPECT_EQ(s[1].dates.size(), 2u);
  EXPECT_EQ(s[0].dates.front().to_string(), "2020-01-01");
  EXPECT_DOUBLE_EQ(s[0].prices.back(), 3.0);
}

TEST(Align, IdenticalDatesAreAFixedPoint) {
  std::vector<PriceSeries> in = {series("A", {"2020-01-01", "2020-01-02", "2020-01-03"}, {1, 2, 3}),
                                 series("B", {"2020-01-01", "2020-01-02", "2020-01-03"}, {4, 5, 6})};
  for (auto policy : {AlignPolicy::intersect, AlignPolicy::forward_fill}) {
    const auto out = align(in, policy);
    for (std::size_t i = 0; i < in.size(); ++i) {
      EXPECT_EQ(out[i].dates, in[i].dates);
      EXPECT_EQ(out[i].prices, in[i].prices);
    }
  }
}

TEST(Align, IntersectAndForwardFill) {
  std::vector<PriceSeries> in = {series("A", {"2020-01-01", "2020-01-02", "2020-01-03"}, {1, 2, 3}),
                                 series("B", {"2020-01-02", "2020-01-03", "2020-01-04"}, {20, 30, 40})};
  const auto inter = align(in, AlignPolicy::intersect);
  const std::vector<Date> d23 = {Date::parse("2020-01-02"), Date::parse("2020-01-03")};
  EXPECT_EQ(inter[0].dates, d23);
  EXPECT_EQ(inter[1].dates, d23);
  EXPECT_EQ(inter[0].prices, (std::vector<double>{2, 3}));
  EXPECT_EQ(inter[1].prices, (std::vector<double>{20, 30}));

  const auto ff = align(in, AlignPolicy::forward_fill);
  const std::vector<Date> d234 = {Date::parse("2020-01-02"), Date::parse("2020-01-03"),
                                  Date::parse("2020-01-04")};
  EXPECT_EQ(ff[0].dates, d234);
  EXPECT_EQ(ff[1].dates, d234);
  EXPECT_EQ(ff[0].prices, (std::vector<double>{2, 3, 3}));
  EXPECT_EQ(ff[1].prices, (std::vector<double>{20, 30, 40}));
}

TEST(Align, ForwardFillsInteriorGaps) {
  std::vector<PriceSeries> in = {series("A", {"2020-01-01", "2020-01-03"}, {1, 3}),
                                 series("B", {"2020-01-01", "2020-01-02", "2020-01-03"}, {4, 5, 6})};
  const auto ff = align(in, AlignPolicy::forward_fill);
  EXPECT_EQ(ff[0].prices, (std::vector<double>{1, 1, 3}));
}

TEST(Align, EmptyIntersectionIsAnError) {
  std::vector<PriceSeries> in = {series("A", {"2020-01-01", "2020-01-02"}, {1, 2}),
                                 series("B", {"2020-01-03", "2020-01-04"}, {3, 4})};
  EXPECT_THROW(align(in, AlignPolicy::intersect), InputError);
  EXPECT_THROW(align({in[0]}), InputError);
}

TEST(LogReturns, ClosedForms) {
  auto panel = log_returns({series("A", {"2020-01-01", "2020-01-02"}, {100, 110}),
                            series("B", {"2020-01-01", "2020-01-02"}, {100, 50})});
  ASSERT_EQ(panel.t(), 1u);
  EXPECT_NEAR(panel.returns(0, 0), 0.0953101798, 1e-9);
  EXPECT_NEAR(panel.returns(1, 0), -0.6931471806, 1e-9);
  EXPECT_EQ(panel.dates.front().to_string(), "2020-01-02");

  panel = log_returns({series("C", {"2020-01-01", "2020-01-02", "2020-01-03"}, {50, 50, 50})});
  EXPECT_EQ(panel.returns(0, 0), 0.0);
  EXPECT_EQ(panel.returns(0, 1), 0.0);
}

TEST(LogReturns, ExponentialGrowthGivesConstantRow) {
  const double g = 0.0123;
  std::vector<std::string> dates;
  std::vector<double> prices;
  Date d = Date::parse("2001-01-01");
  for (int t = 0; t < 250; ++t, d = d.next_day()) {
    dates.push_back(d.to_string());
    prices.push_back(37.5 * std::exp(g * t));
  }
  const auto panel = log_returns({series("G", dates, prices)});
  for (double r : panel.returns.row(0)) EXPECT_NEAR(r, g, 1e-12);
}

TEST(LogReturns, RejectsUnalignedInput) {
  EXPECT_THROW(log_returns({series("A", {"2020-01-01", "2020-01-02"}, {1, 2}),
                            series("B", {"2020-01-01", "2020-01-03"}, {1, 2})}),
               InputError);
}

TEST(Standardize, TwoPointRow) {
  ReturnPanel p{{"A", "B"}, {Date::parse("2020-01-01"), Date::parse("2020-01-02")}, Matrix(2, 2)};
  p.returns(0, 0) = 1;
  p.returns(0, 1) = -1;
  p.returns(1, 0) = 5;
  p.returns(1, 1) = 7;
  const auto s = standardize(p);
  EXPECT_NEAR(s.returns(0, 0), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(s.returns(0, 1), -std::sqrt(0.5), 1e-15);
}

TEST(Standardize, IdempotentAndRejectsConstantRows) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(0.01, 0.3);
  ReturnPanel p{{"A", "B", "C"}, {}, Matrix(3, 200)};
  Date d = Date::parse("2020-01-01");
  for (std::size_t t = 0; t < 200; ++t, d = d.next_day()) p.dates.push_back(d);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t t = 0; t < 200; ++t) p.returns(j, t) = normal(gen);
  const auto once = standardize(p);
  const auto twice = standardize(once);
  EXPECT_LE(max_abs_diff(once.returns, twice.returns), 1e-12);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0, ss = 0;
    for (double v : once.returns.row(j)) mean += v;
    mean /= 200;
    for (double v : once.returns.row(j)) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(mean, 0.0, 1e-14);
    EXPECT_NEAR(ss / 199, 1.0, 1e-12);
  }
  for (std::size_t t = 0; t < 200; ++t) p.returns(1, t) = 0.5;
  try {
    standardize(p);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("B"), std::string::npos);
  }
}

TEST(Ingestion, DeterministicEndToEnd) {
  const std::string csv =
      "date,X,Y,Z\n2020-01-01,10,20,30\n2020-01-02,10.5,19.1,30.2\n"
      "2020-01-03,10.2,,30.9\n2020-01-06,10.9,19.7,31.4\n2020-01-07,11.3,19.2,31.0\n";
  for (auto policy : {AlignPolicy::intersect, AlignPolicy::forward_fill}) {
    const auto a = log_returns(align(parse(csv), policy));
    const auto b = log_returns(align(parse(csv), policy));
    EXPECT_EQ(a.returns, b.returns);
    EXPECT_GE(a.n(), 2u);
    for (double v : a.returns.data()) EXPECT_TRUE(std::isfinite(v));
  }
  EXPECT_EQ(log_returns(align(parse(csv))).t(), 3u);
  EXPECT_EQ(log_returns(align(parse(csv), AlignPolicy::forward_fill)).t(), 4u);
}

TEST(PriceExport, RoundTripsReturns) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal(0.0, 0.02);
  ReturnPanel p{{"A", "B"}, {}, Matrix(2, 300)};
  Date d = Date::parse("2010-03-01");
  for (std::size_t t = 0; t < 300; ++t, d = d.next_day()) p.dates.push_back(d);
  for (std::size_t j = 0; j < 2; ++j)
    for (double& v : p.returns.row(j)) v = normal(gen);
  std::stringstream csv;
  write_prices_csv(csv, prices_from_returns(p));
  const auto back = log_returns(align(load_prices(csv)));
  EXPECT_EQ(back.dates, p.dates);
  EXPECT_LE(max_abs_diff(back.returns, p.returns), 1e-9);
}
