#include "diffeoflow/descriptor.hpp"
#include "diffeoflow/dff_io.hpp"
#include "diffeoflow/diffeo.hpp"
#include "diffeoflow/errors.hpp"
#include "diffeoflow/json_text.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace diffeoflow;

namespace {

std::string header(int dim, double half_width, int points, int components, const char* hint = nullptr) {
  std::ostringstream h;
  h << R"({"format":"dff-v1","dim":)" << dim << R"(,"half_width":)" << half_width << R"(,"points_per_axis":)"
    << points << R"(,"class_hint":)" << (hint ? std::string("\"") + hint + "\"" : "null") << R"(,"components":)"
    << components << "}\n";
  return h.str();
}

// "1,2,...,count" plus a newline.
std::string row(int count) {
  std::string r;
  for (int k = 1; k <= count; ++k) r += (k > 1 ? "," : "") + std::to_string(k);
  return r + "\n";
}

DffData parse(const std::string& text) {
  std::istringstream in(text);
  return read_dff(in);
}

}  // namespace

TEST_CASE("dff round trip is exact") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int dim = 1; dim <= 3; ++dim) {
    const Grid g(dim, 2.5, 17);
    std::vector<ScalarField> comps;
    for (int c = 0; c < dim; ++c) {
      Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(g.node_count()), [&] { return u(rng); });
      v[0] = std::numeric_limits<double>::denorm_min();
      v[1] = -0.0;
      v[2] = 1.0 / 3.0;
      comps.emplace_back(g, v);
    }
    std::ostringstream out;
    write_dff(out, comps, DecayClass::SobolevInfinity);
    const auto back = parse(out.str());
    CHECK(back.grid == g);
    CHECK(back.class_hint == DecayClass::SobolevInfinity);
    REQUIRE(back.components.size() == comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) CHECK(back.components[c].samples() == comps[c].samples());
    CHECK(std::signbit(back.components[0][1]));

    // Writing the parsed data again reproduces the text.
    std::ostringstream again;
    write_dff(again, back.components, back.class_hint);
    CHECK(again.str() == out.str());
  }
}

TEST_CASE("dff reader accepts a hand-written file") {
  const auto d = parse(header(1, 1.0, 17, 1, "Schwartz") + "0,0,0,0,0,0,0,0.5,1,0.5,0,0,0,0,0,0,0\r\n");
  CHECK(d.grid == Grid(1, 1.0, 17));
  CHECK(d.class_hint == DecayClass::Schwartz);
  CHECK(d.components[0][8] == 1.0);
  CHECK(d.components[0][7] == 0.5);
  CHECK_FALSE(parse(header(1, 1.0, 17, 1) + row(17)).class_hint.has_value());
  const auto two = parse(header(2, 1.0, 17, 2) + row(289) + row(289));
  CHECK(two.displacement().dim() == 2);
  CHECK(two.components[1][288] == 289.0);
}

TEST_CASE("dff reader rejects malformed input") {
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("not json\n1,2,3\n"), ParseError);
  CHECK_THROWS_AS(parse(R"({"format":"dff-v2","dim":1,"half_width":1,"points_per_axis":17,"class_hint":null,"components":1})"
                        "\n" + row(17)),
                  ParseError);
  CHECK_THROWS_AS(parse(header(1, 1.0, 17, 1, "Smooth") + row(17)), ParseError);
  CHECK_THROWS_AS(parse(header(1, 1.0, 17, 1) + row(16)), ParseError);
  CHECK_THROWS_AS(parse(header(1, 1.0, 17, 1) + row(18)), ParseError);
  CHECK_THROWS_AS(parse(header(1, 1.0, 17, 1) + "1,2,x" + row(14).substr(1)), ParseError);
  CHECK_THROWS_AS(parse(header(1, 1.0, 17, 2) + row(17)), ParseError);
  CHECK_THROWS_AS(parse(header(1, 1.0, 17, 1) + row(17) + "6\n"), ParseError);
  CHECK_THROWS_AS(parse(header(1, 1.0, 16, 1) + row(16)), ParseError);
  CHECK_THROWS_AS(parse(header(4, 1.0, 5, 1) + "1\n"), ParseError);
  CHECK_THROWS_AS(parse(R"({"dim":1})" "\n1\n"), ParseError);
  try {
    parse(header(1, 1.0, 17, 1) + row(16));
    FAIL("short row accepted");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("16 samples, expected 17") != std::string::npos);
  }
}

TEST_CASE("missing files raise IoError") {
  CHECK_THROWS_AS(read_dff(std::string("/nonexistent/dir/field.dff")), IoError);
  const Grid g(1, 1.0, 17);
  CHECK_THROWS_AS(write_dff(std::string("/nonexistent/dir/field.dff"), {ScalarField::zeros(g)}), IoError);
}

TEST_CASE("diffeo sidecar") {
  const auto dir = std::filesystem::temp_directory_path() / "diffeoflow_test_io";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "g.dff").string();
  const Grid g(1, 8.0, 129);
  const Diffeo phi(sample(VectorDescriptor::parse("0.25*tanh(x)", 1), g), DecayClass::BoundedAll);
  write_diffeo(path, phi);

  std::ifstream meta(path + ".meta.json");
  const auto j = Json::parse(meta);
  CHECK(j.at("decay_class").get<std::string>() == "BoundedAll");
  CHECK(j.at("epsilon").get<double>() == phi.epsilon());

  // The sidecar class wins over the header hint.
  write_dff(path, phi.displacement().components(), DecayClass::CompactSupport);
  CHECK(read_diffeo(path).decay_class() == DecayClass::BoundedAll);
  std::filesystem::remove(path + ".meta.json");
  CHECK(read_diffeo(path).decay_class() == DecayClass::CompactSupport);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dump_json is deterministic and round-trips doubles") {
  Json j = Json::object();
  j["pi"] = 3.141592653589793;
  j["third"] = 1.0 / 3.0;
  j["tiny"] = 5e-324;
  j["int"] = 42;
  j["list"] = Json::array({0.1, -2.5e300, true, nullptr, "text"});
  j["nested"] = Json::object({{"a", 1.0}, {"b", Json::array()}});
  j["nan"] = std::nan("");
  const auto a = dump_json(j);
  CHECK(a == dump_json(j));
  CHECK(a.find("0.33333333333333331") != std::string::npos);
  CHECK(a.find("3.1415926535897931") != std::string::npos);
  const auto back = Json::parse(a);
  CHECK(back["third"].get<double>() == 1.0 / 3.0);
  CHECK(back["tiny"].get<double>() == 5e-324);
  CHECK(back["list"][1].get<double>() == -2.5e300);
  CHECK(back["nan"].is_null());
  CHECK(back["int"].get<int>() == 42);
  // Key order is preserved.
  CHECK(a.find("\"pi\"") < a.find("\"third\""));
  CHECK(dump_json(Json::parse(dump_json(back))) == dump_json(back));
}
