#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "tfe/io.hpp"
#include "tfe/spectral.hpp"

using namespace tfe;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("tfe_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("config round trip") {
    RunConfig c = default_config(1);
    c.kmax = 7;
    c.n_list = {0.3, 0.15};
    c.branch.k = 2;
    c.branch.kind = "global";
    c.evolve.taus = {1, 2, 4};
    c.profile.rtol = 1e-9;
    RunConfig d = config_from_json(config_to_json(c));
    CHECK(config_to_json(d).dump() == config_to_json(c).dump());
    CHECK(d.kmax == 7);
    CHECK(d.branch.kind == "global");
    CHECK(d.profile.rtol == 1e-9);
  }

  TEST_CASE("2D defaults") {
    RunConfig c = default_config(2);
    CHECK(c.N == 2);
    CHECK(c.h == 0.1);
    CHECK(c.R == 24);
    CHECK_NOTHROW(validate(c));
  }

  TEST_CASE("bad configs are config errors") {
    auto expect_config_error = [](const Json& j) {
      try {
        config_from_json(j);
        FAIL("accepted " << j.dump());
      } catch (const Error& e) {
        CHECK(e.is_config());
      }
    };
    expect_config_error({{"dimension", 1}, {"gird", {{"h", 0.05}}}});
    expect_config_error({{"dimension", 3}});
    expect_config_error({{"grid", {{"h", -1.0}}}});
    expect_config_error({{"n_list", {0.2, 0.9}}});
    expect_config_error({{"kmax", 40}});
    expect_config_error({{"continue", {{"kind", "global"}, {"k", 1}}}});
    expect_config_error({{"branch", {{"kind", "sideways"}}}});
    expect_config_error({{"evolve", {{"taus", {1.0}}}}});
    expect_config_error({{"kmax", "five"}});
  }

  TEST_CASE("config files") {
    auto d = scratch_dir("cfg");
    {
      std::ofstream(d / "ok.json") << R"({"dimension": 1, "kmax": 3, "output": {"dir": "x"}})";
      std::ofstream(d / "broken.json") << "{\"dimension\": ";
    }
    RunConfig c = load_config((d / "ok.json").string());
    CHECK(c.kmax == 3);
    CHECK(c.out_dir == "x");
    CHECK_THROWS_AS(load_config((d / "broken.json").string()), Error);
    CHECK_THROWS_AS(load_config((d / "missing.json").string()), Error);
  }

  TEST_CASE("base64 of doubles") {
    CHECK(base64_encode({1.0}) == "AAAAAAAA8D8=");
    CHECK(base64_encode({}) == "");
    std::vector<double> v{0.0, -2.5, 1e-300, 3.141592653589793, 7.0};
    auto w = base64_decode(base64_encode(v));
    REQUIRE(w.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(w[i] == v[i]);
    CHECK_THROWS_AS(base64_decode("AAAA"), Error);
  }

  TEST_CASE("17-digit numbers in CSV") {
    CHECK(fmt(0.1) == "0.10000000000000001");
    CHECK(std::stod(fmt(1.0 / 3)) == 1.0 / 3);
    auto d = scratch_dir("csv");
    {
      CsvWriter w((d / "a.csv").string(), {"x", "k", "s"});
      w << 2.0 / 3 << 4 << std::string("ok");
      w.end_row();
    }
    CHECK(slurp(d / "a.csv") == "x,k,s\n0.66666666666666663,4,ok\n");
  }

  TEST_CASE("table JSON round trip") {
    KernelTable t = eval_kernel(1, default_grid(1), 2);
    KernelTable u = table_from_json(table_to_json(t));
    CHECK(u.grid.same_as(t.grid));
    CHECK(u.K == t.K);
    REQUIRE(u.values.size() == t.values.size());
    for (const auto& [b, v] : t.values) CHECK(u.at(b) == v);
    CHECK(u.D_fit == t.D_fit);
    CHECK(u.d_fit == t.d_fit);
  }

  TEST_CASE("polynomial JSON round trip") {
    for (const auto& b : multi_indices_upto(2, 6)) {
      SparsePolynomial p = adjoint_polynomial(b);
      SparsePolynomial q = polynomial_from_json(polynomial_to_json(p));
      CHECK(q.N == p.N);
      CHECK(q.normalizer == p.normalizer);
      CHECK(q.terms == p.terms);
    }
  }
}
