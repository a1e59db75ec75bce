#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "mirs/data.hpp"
#include "mirs/errors.hpp"

using mirs::DataMatrix;
using mirs::Source;

namespace {

std::string temp_path(const std::string& tag) {
  return "mirs_test_data_" + tag + ".csv";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DataMatrix make_random_dataset(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.001, 1.0);
  std::bernoulli_distribution coin;
  DataMatrix data;
  for (std::size_t i = 0; i < n; ++i) {
    const bool observed = !coin(gen);
    data.push_row(normal(gen), normal(gen), coin(gen) ? 1 : 0, observed,
                  coin(gen) ? Source::Convenience : Source::Probability,
                  unif(gen), static_cast<std::uint64_t>(i) << 32);
  }
  return data;
}

}  // namespace

TEST_CASE("parses a small file with one masked outcome") {
  const auto path = temp_path("small");
  write_file(path,
             "x1,x2,y,source,p_s\n"
             "0.5,-1,1,prob,0.02\n"
             "1.25,0.75,,conv,0.02\n"
             "-2,3,0,conv,0.02\n");
  const DataMatrix data = mirs::read_csv(path);
  REQUIRE(data.n() == 3);
  CHECK(data.n_missing() == 1);
  CHECK(data.y_observed[0]);
  CHECK_FALSE(data.y_observed[1]);
  CHECK(data.y_observed[2]);
  CHECK(data.x1[1] == 1.25);
  CHECK(data.source[0] == Source::Probability);
  CHECK(data.source[1] == Source::Convenience);
  CHECK(data.y[2] == 0);
  std::remove(path.c_str());
}

TEST_CASE("rejects unknown source labels, naming the line") {
  const auto path = temp_path("badsource");
  write_file(path,
             "x1,x2,y,source,p_s\n"
             "0,0,1,prob,0.02\n"
             "0,0,1,panel,0.02\n");
  try {
    mirs::read_csv(path);
    FAIL("expected InputError");
  } catch (const mirs::InputError& e) {
    CHECK(std::string(e.what()).find("panel") != std::string::npos);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("rejects p_s outside (0, 1]") {
  const auto path = temp_path("badps");
  write_file(path,
             "x1,x2,y,source,p_s\n"
             "0,0,1,prob,0\n");
  CHECK_THROWS_AS(mirs::read_csv(path), mirs::InputError);
  write_file(path,
             "x1,x2,y,source,p_s\n"
             "0,0,1,prob,1.5\n");
  CHECK_THROWS_AS(mirs::read_csv(path), mirs::InputError);
  std::remove(path.c_str());
}

TEST_CASE("rejects malformed rows and headers") {
  const auto path = temp_path("malformed");
  write_file(path, "x1,x2,y,source\n0,0,1,prob\n");
  CHECK_THROWS_AS(mirs::read_csv(path), mirs::InputError);
  write_file(path, "x1,x2,y,source,p_s\n0,0,2,prob,0.02\n");
  CHECK_THROWS_AS(mirs::read_csv(path), mirs::InputError);
  write_file(path, "x1,x2,y,source,p_s\nabc,0,1,prob,0.02\n");
  CHECK_THROWS_AS(mirs::read_csv(path), mirs::InputError);
  write_file(path, "x1,x2,y,source,p_s\n0,0,1,prob\n");
  CHECK_THROWS_AS(mirs::read_csv(path), mirs::InputError);
  std::remove(path.c_str());
}

TEST_CASE("empty dataset writes a header-only file") {
  const auto path = temp_path("empty");
  mirs::write_csv(DataMatrix{}, path);
  CHECK(read_file(path) == "x1,x2,y,source,p_s\n");
  std::remove(path.c_str());
}

TEST_CASE("fully observed data leaves no empty y fields") {
  const auto path = temp_path("allobs");
  std::mt19937_64 gen(7);
  DataMatrix data = make_random_dataset(gen, 20);
  for (auto& obs : data.y_observed) obs = 1;
  mirs::write_csv(data, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) CHECK(line.find(",,") == std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("write/read round trip preserves the data") {
  const auto path = temp_path("roundtrip");
  std::mt19937_64 gen(12345);
  for (int rep = 0; rep < 50; ++rep) {
    const DataMatrix data = make_random_dataset(gen, 1 + rep % 40);
    mirs::write_csv(data, path);
    const DataMatrix back = mirs::read_csv(path);
    CHECK(mirs::same_data(data, back));
  }
  std::remove(path.c_str());
}

TEST_CASE("complete_y guards against reading masked outcomes") {
  std::mt19937_64 gen(3);
  DataMatrix data = make_random_dataset(gen, 30);
  bool any_missing = data.n_missing() > 0;
  if (!any_missing) {
    data.y_observed[0] = 0;
    any_missing = true;
  }
  CHECK_THROWS_AS(data.complete_y(), mirs::EstimateError);
  for (auto& obs : data.y_observed) obs = 1;
  CHECK(data.complete_y().size() == data.n());
}

TEST_CASE("validate flags inconsistent columns") {
  DataMatrix data;
  data.push_row(0, 0, 1, true, Source::Probability, 0.02, 0);
  data.x2.push_back(1.0);
  CHECK_THROWS_AS(data.validate(), mirs::InputError);
}
