#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>

#include "mixsaem/data_model.hpp"
#include "mixsaem/params_io.hpp"
#include "oracles.hpp"

using namespace mixsaem;

namespace {

Schema small_schema() {
  return schema_from_json(R"({"outcome":"y","columns":[
    {"name":"a","kind":"discrete","levels":3},
    {"name":"b","kind":"continuous"}]})");
}

}  // namespace

TEST_CASE("csv without NA tokens is fully observed") {
  const auto ds = parse_csv("a,b,y\n1,0.5,0\n3,-2,1\n", small_schema());
  CHECK(ds.rows() == 2);
  CHECK(ds.fully_observed());
  CHECK(ds.values()(1, 0) == 3.0);
  CHECK(ds.values()(1, 1) == -2.0);
  CHECK(ds.outcomes() == std::vector<int>{0, 1});
}

TEST_CASE("csv column of NA becomes an all-missing mask column") {
  const auto ds = parse_csv("a,b,y\n1,NA,0\n2,NA,1\n3,NA,1\n", small_schema());
  CHECK_FALSE(ds.mask().col(1).any());
  CHECK(ds.mask().col(0).all());
}

TEST_CASE("single NA lands at its cell") {
  const auto ds = parse_csv("a,b,y\n1,0.1,0\n2,0.2,1\n3,NA,1\n", small_schema());
  CHECK(ds.missing_count() == 1);
  CHECK_FALSE(ds.observed(2, 1));
  const auto again = parse_csv(format_csv(ds), small_schema());
  CHECK((again.mask() == ds.mask()).all());
}

TEST_CASE("header order may differ from schema order") {
  const auto ds = parse_csv("y,b,a\n0,1.5,2\n", small_schema());
  CHECK(ds.values()(0, 0) == 2.0);
  CHECK(ds.values()(0, 1) == 1.5);
}

TEST_CASE("csv errors identify the offending cell") {
  const auto schema = small_schema();
  auto message = [&](const std::string& text) {
    try {
      parse_csv(text, schema);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("a,b,y\n4,0.1,0\n").find("column 'a'") != std::string::npos);
  CHECK(message("a,b,y\n1,abc,0\n").find("column 'b'") != std::string::npos);
  CHECK(message("a,b,y\n1,0.1,NA\n").find("missing outcome") != std::string::npos);
  CHECK(message("a,c,y\n1,0.1,0\n").find("'b'") != std::string::npos);
  CHECK(message("a,b,y\n1,0.1\n").find("row 1") != std::string::npos);
  CHECK_THROWS_AS(parse_csv("a,b,y\n", schema), DataError);
}

TEST_CASE("custom delimiter and NA token") {
  CsvOptions opts;
  opts.delimiter = ';';
  opts.na_token = "?";
  const auto ds = parse_csv("a;b;y\n?;1.25;1\n", small_schema(), opts);
  CHECK_FALSE(ds.observed(0, 0));
  CHECK(format_csv(ds, opts) == "a;b;y\n?;1.25;1\n");
}

TEST_CASE("labelled discrete levels map through the schema") {
  const auto schema = schema_from_json(R"({"columns":[
    {"name":"sex","kind":"discrete","labels":["female","male"]},
    {"name":"age","kind":"continuous"}],"outcome":"survived"})");
  const auto ds = parse_csv("sex,age,survived\nmale,30,1\nfemale,NA,0\n", schema);
  CHECK(ds.values()(0, 0) == 2.0);
  CHECK(ds.values()(1, 0) == 1.0);
  CHECK(schema_from_json(schema_to_json(schema)).columns[0].labels.at("male") == 2);
}

TEST_CASE("schema validation") {
  CHECK_THROWS_AS(schema_from_json(R"({"columns":[{"name":"a","kind":"discrete","levels":1}]})"),
                  DataError);
  CHECK_THROWS_AS(schema_from_json(R"({"columns":[{"name":"a","kind":"continuous"},
                                                  {"name":"a","kind":"continuous"}]})"),
                  DataError);
  CHECK_THROWS_AS(schema_from_json(R"({"columns":[{"name":"a","kind":"ordinal"}]})"), DataError);
  // Discrete columns are moved in front, keeping their relative order.
  const auto s = schema_from_json(R"({"columns":[{"name":"c","kind":"continuous"},
    {"name":"d1","kind":"discrete","levels":2},{"name":"d2","kind":"discrete","levels":4}]})");
  CHECK(s.columns[0].name == "d1");
  CHECK(s.columns[1].name == "d2");
  CHECK(s.columns[2].name == "c");
}

TEST_CASE("save and load round trip") {
  std::mt19937_64 rng(7);
  const auto params = oracle::random_params(rng, {2, 4}, 3);
  const auto full = oracle::random_dataset(rng, params, 50, 0.0);
  const auto masked = oracle::random_dataset(rng, params, 50, 0.3);
  const auto dir = std::filesystem::temp_directory_path() / "mixsaem_dm_test";
  std::filesystem::create_directories(dir);
  for (const auto* ds : {&full, &masked}) {
    const auto path = (dir / "rt.csv").string();
    save_csv(*ds, path);
    const auto back = load_csv(path, ds->schema());
    CHECK((back.mask() == ds->mask()).all());
    CHECK(back.outcomes() == ds->outcomes());
    for (Eigen::Index i = 0; i < back.values().rows(); ++i)
      for (Eigen::Index j = 0; j < back.values().cols(); ++j)
        if (ds->mask()(i, j)) CHECK(back.values()(i, j) == ds->values()(i, j));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("0.1 + 0.2 survives formatting") {
  const double v = 0.1 + 0.2;
  Eigen::MatrixXd values(1, 2);
  values << 1.0, v;
  const auto ds = oracle::make_dataset(small_schema(), {1}, values, BoolMatrix::Constant(1, 2, true));
  const auto back = parse_csv(format_csv(ds), small_schema());
  CHECK(std::abs(back.values()(0, 1) - v) <= 1e-15);
}

TEST_CASE("dataset invariants are enforced") {
  const auto schema = small_schema();
  Eigen::MatrixXd values(1, 2);
  values << 4.0, 0.0;
  CHECK_THROWS_AS(HybridDataset(schema, {1}, values, BoolMatrix::Constant(1, 2, true)), DataError);
  values << 1.0, 0.0;
  CHECK_THROWS_AS(HybridDataset(schema, {2}, values, BoolMatrix::Constant(1, 2, true)), DataError);
  CHECK_THROWS_AS(HybridDataset(schema, {1}, values, BoolMatrix::Constant(2, 2, true)), DataError);
  values(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(HybridDataset(schema, {1}, values, BoolMatrix::Constant(1, 2, true)), DataError);
}

TEST_CASE("sample views partition coordinates") {
  std::mt19937_64 rng(11);
  const auto params = oracle::random_params(rng, {3, 2}, 4);
  for (int rep = 0; rep < 20; ++rep) {
    const auto ds = oracle::random_dataset(rng, params, 30, 0.4);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      const auto s = sample_view(ds, i);
      CHECK(s.obs_discrete.size() + s.mis_discrete.size() == 2);
      CHECK(s.obs_continuous.size() + s.mis_continuous.size() == 4);
      std::set<std::size_t> d(s.obs_discrete.begin(), s.obs_discrete.end());
      for (const auto j : s.mis_discrete) {
        CHECK(d.insert(j).second);
        CHECK(s.discrete[j] == 0);
      }
      std::set<std::size_t> c(s.obs_continuous.begin(), s.obs_continuous.end());
      for (const auto k : s.mis_continuous) {
        CHECK(c.insert(k).second);
        CHECK(std::isnan(s.continuous(static_cast<Eigen::Index>(k))));
      }
      CHECK(s.complete() == ds.row_complete(i));
    }
  }
}

TEST_CASE("train/test split sizes, determinism and partition") {
  std::mt19937_64 rng(3);
  const auto params = oracle::random_params(rng, {2}, 1);
  const auto ds = oracle::random_dataset(rng, params, 10, 0.0);
  const auto [train, test] = split_train_test(ds, 0.2, 99);
  CHECK(train.rows() == 8);
  CHECK(test.rows() == 2);
  const auto [train2, test2] = split_train_test(ds, 0.2, 99);
  CHECK(train.values() == train2.values());
  CHECK(test.values() == test2.values());

  // Every original row lands in exactly one part; rows are identified by
  // their continuous value.
  std::multiset<double> all, parts;
  for (Eigen::Index i = 0; i < 10; ++i) all.insert(ds.values()(i, 1));
  for (Eigen::Index i = 0; i < 8; ++i) parts.insert(train.values()(i, 1));
  for (Eigen::Index i = 0; i < 2; ++i) parts.insert(test.values()(i, 1));
  CHECK(all == parts);

  const auto big = oracle::random_dataset(rng, params, 101, 0.0);
  const auto [tr, te] = split_train_test(big, 0.3, 1);
  CHECK(tr.rows() == 71);  // ceil(101 * 0.7)
  CHECK(te.rows() == 30);  // floor(101 * 0.3)
  CHECK_THROWS_AS(split_train_test(ds, 0.0, 1), DataError);
  CHECK_THROWS_AS(split_train_test(ds, 1.0, 1), DataError);
}

TEST_CASE("subset and with_mask") {
  std::mt19937_64 rng(5);
  const auto params = oracle::random_params(rng, {2}, 2);
  const auto ds = oracle::random_dataset(rng, params, 6, 0.0);
  const auto sub = ds.subset({4, 1});
  CHECK(sub.rows() == 2);
  CHECK(sub.values().row(0) == ds.values().row(4));
  BoolMatrix mask = ds.mask();
  mask(2, 1) = false;
  const auto masked = ds.with_mask(mask);
  CHECK(std::isnan(masked.values()(2, 1)));
  CHECK_THROWS_AS(masked.with_mask(ds.mask()), DataError);
}
