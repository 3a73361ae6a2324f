#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "liftode/cli.hpp"
#include "liftode/lifting.hpp"

using namespace liftode;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kFixtures = LIFTODE_TEST_FIXTURE_DIR;

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("derive plain") {
    const auto r = run_cli({"derive", "-m", "2", "--style", "plain"});
    CHECK(r.code == 0);
    CHECK(r.out.find("c2 = -3*p\n") != std::string::npos);
    CHECK(r.out.find("c1 = 2*p^2 - p' - 4*q\n") != std::string::npos);
    CHECK(r.out.find("c0 = 4*p*q - 2*q'\n") != std::string::npos);
    CHECK(run_cli({"derive", "-m", "2"}).out == r.out);
  }

  TEST_CASE("derive json round-trips") {
    const auto r = run_cli({"derive", "-m", "4", "--style", "json"});
    REQUIRE(r.code == 0);
    CHECK(parse_lifted_ode_json(r.out) == derive_lifted_ode(4));
    CHECK(nlohmann::json::parse(r.out).dump(2) + "\n" == r.out);
  }

  TEST_CASE("derive usage errors") {
    CHECK(run_cli({"derive", "-m", "0"}).code == 2);
    CHECK(run_cli({"derive"}).code == 2);
    CHECK(run_cli({"derive", "-m", "2", "--style", "mathml"}).code == 2);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    const auto help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("check-paper") != std::string::npos);
  }

  TEST_CASE("check-paper single powers") {
    for (const char* m : {"2", "3", "5"}) {
      const auto r = run_cli({"check-paper", "-m", m, "--fixtures", kFixtures});
      CHECK_MESSAGE(r.code == 0, "m = " << m);
      CHECK(r.out.rfind("PASS  m=" + std::string(m), 0) == 0);
    }
    const auto r4 = run_cli({"check-paper", "-m", "4", "--fixtures", kFixtures});
    CHECK(r4.code == 1);
    CHECK(r4.out.find("FAIL  m=4  order_m4.txt  (3/5 coefficients match)") != std::string::npos);
    CHECK(r4.out.find("c1: derived - fixture = -8*p*q'") != std::string::npos);
    CHECK(r4.out.find("c2: derived - fixture = 41*p*p'") != std::string::npos);
  }

  TEST_CASE("check-paper --all reports every fixture") {
    const auto r = run_cli({"check-paper", "--all", "--fixtures", kFixtures});
    CHECK(r.code == 1);
    for (const char* m : {"m=2", "m=3", "m=4", "m=5"}) CHECK(r.out.find(m) != std::string::npos);
  }

  TEST_CASE("check-paper usage") {
    CHECK(run_cli({"check-paper", "-m", "7"}).code == 2);
    CHECK(run_cli({"check-paper", "-m", "1"}).code == 2);
    CHECK(run_cli({"check-paper"}).code == 2);
    CHECK(run_cli({"check-paper", "-m", "2", "--all"}).code == 2);
  }

  TEST_CASE("check-paper against a corrupted fixture") {
    const auto dir = std::filesystem::temp_directory_path() / "liftode_cli_corrupt";
    std::filesystem::create_directories(dir);
    {
      std::ofstream f(dir / "order_m2.txt");
      f << "2*(q' - 2*p*q)\n-(4*q - 2*p^2 + p')\n-3*p\n";
    }
    const auto r = run_cli({"check-paper", "-m", "2", "--fixtures", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("c0: derived - fixture = 8*p*q - 4*q'") != std::string::npos);
    // A missing file is a computation failure, not a usage error.
    CHECK(run_cli({"check-paper", "-m", "3", "--fixtures", dir.string()}).code == 1);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("verify passes and fails with the right codes") {
    const auto ok = run_cli({"verify", "-m", "3", "--p", "sin(x)", "--q", "x", "--interval", "0", "1", "--step",
                             "0.001"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("result: PASS") != std::string::npos);

    const auto dependent = run_cli({"verify", "-m", "2", "--p", "0", "--q", "-1", "--ic-g", "2", "0"});
    CHECK(dependent.code == 1);

    const auto printed = run_cli({"verify", "-m", "4", "--p", "sin(x)", "--q", "x", "--fixture",
                                  kFixtures + "/order_m4.txt"});
    CHECK(printed.code == 1);
    CHECK(run_cli({"verify", "-m", "3", "--p", "sin(x)", "--q", "x", "--fixture", kFixtures + "/order_m3.txt"})
              .code == 0);
  }

  TEST_CASE("verify json") {
    const auto r = run_cli({"verify", "-m", "2", "--p", "1/(x+2)", "--q", "exp(-x)", "--json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["pass"] == true);
    CHECK(doc["p"] == "1/(x + 2)");
    CHECK(doc["monomials"].size() == 3);
  }

  TEST_CASE("verify usage and domain errors") {
    CHECK(run_cli({"verify", "-m", "2", "--p", "sin(x", "--q", "x"}).code == 2);
    CHECK(run_cli({"verify", "-m", "2", "--p", "0", "--q", "x", "--step", "0.5"}).code == 2);
    CHECK(run_cli({"verify", "-m", "2", "--p", "0", "--q", "x", "--interval", "1", "0"}).code == 2);
    CHECK(run_cli({"verify", "-m", "2", "--q", "x"}).code == 2);
    const auto dom = run_cli({"verify", "-m", "2", "--p", "ln(x)", "--q", "x"});
    CHECK(dom.code == 1);
    CHECK(dom.err.find("ln(x)") != std::string::npos);
  }
}
