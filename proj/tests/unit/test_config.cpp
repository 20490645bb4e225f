#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cogrowth/config.hpp"
#include "cogrowth/errors.hpp"
#include "cogrowth/runner.hpp"
#include "doctest.h"

using namespace cogrowth;

namespace {

std::string strip_time(const std::string& json) {
  const auto at = json.find("\"wall_time_s\"");
  return at == std::string::npos ? json : json.substr(0, at);
}

}  // namespace

TEST_CASE("one-line drift config") {
  const auto c = parse_config("experiment=drift k=2 n=1000 m=100 seed=7");
  CHECK(c.experiment == "drift");
  CHECK(c.seed == 7);
  REQUIRE(c.param("n") != nullptr);
  CHECK(*c.param("n") == "1000");
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("sections, comments and named constants") {
  const auto c = parse_config(
      "# comment\n[run]\nexperiment = poincare\nseed = 3\n[params]\nk = 2  # rank\ns = log3\n");
  CHECK(ParamReader(c).real("s") == doctest::Approx(std::log(3.0)));
  CHECK(ParamReader(c).uint("j_max") == 30);
}

TEST_CASE("rejections name the key") {
  auto message = [](const std::string& text) {
    try {
      validate(parse_config(text));
    } catch (const PreconditionError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("experiment=hitting q=1.5").find("params.q") != std::string::npos);
  CHECK(message("experiment=drift bogus=1").find("bogus") != std::string::npos);
  CHECK(message("experiment=drift k=2 k=3").find("k") != std::string::npos);
  CHECK(message("experiment=nope").find("experiment") != std::string::npos);
  CHECK(message("experiment=drift n=10").find("params.n") != std::string::npos);
  CHECK(message("experiment=drift\n[other]\nx=1").find("other") != std::string::npos);
  CHECK(message("experiment=drift k=x").find("params.k") != std::string::npos);
}

TEST_CASE("round trip on the golden configs") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(COGROWTH_GOLDEN "/configs")) {
    std::ifstream f(entry.path());
    std::stringstream text;
    text << f.rdbuf();
    const auto c = parse_config(text.str());
    CHECK(parse_config(serialize(c)) == c);
    const auto full = c.with_defaults();
    CHECK(parse_config(serialize(full)) == full);
    CHECK(serialize(parse_config(serialize(c))) == serialize(c));
    ++seen;
  }
  CHECK(seen == 10);
}

TEST_CASE("runner results") {
  auto c = parse_config("experiment=drift k=2 n=1000 m=100 seed=7");
  const auto r = run(c);
  CHECK(r.status == "ok");
  CHECK(r.results["drift"]["value"].get<double>() == doctest::Approx(0.5).epsilon(0.03));

  auto s = load_config(COGROWTH_GOLDEN "/configs/06_poincare.ini");
  auto d = parse_config("experiment=subgroup-delta");
  d.base_dir = s.base_dir;
  d.set_param("subgroup", "file:../../fixtures/subgroups/a_bab.core");
  const auto sd = run(d);
  CHECK(sd.status == "ok");
  CHECK(sd.results["spectrum"]["delta"].get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("runner determinism across repeats and workers") {
  for (const char* text : {"experiment=drift k=3 n=300 m=40 seed=11",
                           "experiment=hitting k=2 i=30,60 m=40 seed=2",
                           "experiment=freeproduct n=200 m=20 f_horizon=100 seed=4"}) {
    const auto c = parse_config(text);
    RunOptions one, many;
    many.workers = 8;
    const auto a = to_json(run(c, one));
    CHECK(strip_time(a) == strip_time(to_json(run(c, one))));
    CHECK(strip_time(a) == strip_time(to_json(run(c, many))));
  }
}

TEST_CASE("budget exhaustion keeps partial results") {
  auto c = parse_config("experiment=quotient-growth quotient=free n_max=12 budget=50");
  const auto r = run(c);
  CHECK(r.status == "budget-exhausted");
  CHECK(r.exit_code == 3);
  CHECK_THROWS_AS(run(parse_config("experiment=hitting q=1.5")), PreconditionError);
}
