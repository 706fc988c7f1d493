#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "posmon/cli.hpp"
#include "posmon/witness.hpp"

using namespace posmon;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("classify emits the report") {
  const auto r = call({"classify", "conductive:Z2:a=(1,0)", "--json"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("verdicts").at("BFM").at("status") == "Proved");
  CHECK(j.at("verdicts").at("FFM").at("status") == "Refuted");
}

TEST_CASE("chain emits a replayable certificate") {
  const auto r = call({"chain", "mq:2/3", "--depth", "10", "--json"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("replay") == true);
  CHECK(replay_chain(ChainCertificate::from_json(j)).ok);
}

TEST_CASE("text output uses Z and L") {
  CHECK(call({"factorize", "nm:3,5", "15"}).out.starts_with("Z(15): 2 factorizations"));
  CHECK(call({"lengths", "nm:3,5", "15"}).out == "L(15) = {3, 5}\n");
  CHECK(call({"atoms", "conductive:Z:a=3"}).out.starts_with("Atoms(conductive:Z:a=3) = {3, 4, 5}"));
}

TEST_CASE("exit codes") {
  CHECK(call({"probe", "nm:3,4,5", "HFM", "--bound", "60"}).code == kExitRefuted);
  CHECK(call({"probe", "conductive:Z:a=2", "LFM", "--bound", "60"}).code == kExitOk);
  CHECK(call({"atoms", "nope:1"}).code == kExitUsage);
  CHECK(call({"factorize", "nm:3,5", "(1,2)"}).code == kExitUsage);
  CHECK(call({"factorize", "nm:3,5", "7"}).code == kExitUsage);
  CHECK(call({"frobnicate"}).code == kExitUsage);
  CHECK(call({}).code == kExitUsage);
  CHECK(call({"--help"}).code == kExitOk);
}

TEST_CASE("verify replays files and flags tampering") {
  const std::string path = "posmon_cli_test_chain.json";
  auto cert = mq_chain(Rational(2, 3), 6).to_json();
  std::ofstream(path) << cert.dump();
  CHECK(call({"verify", path}).out == "OK\n");
  CHECK(call({"verify", path}).code == kExitOk);

  cert["differences"][2] = "1/2";
  std::ofstream(path) << cert.dump();
  CHECK(call({"verify", path}).code == kExitInconsistent);
  std::remove(path.c_str());
  CHECK(call({"verify", "does-not-exist.json"}).code == kExitUsage);
}

TEST_CASE("gallery listing and single entries") {
  const auto list = call({"gallery", "--json"});
  REQUIRE(list.code == kExitOk);
  const auto j = nlohmann::json::parse(list.out);
  CHECK(j.size() >= 11);
  const auto entry = call({"gallery", "--entry", "hfm-NxZ"});
  CHECK(entry.code == kExitOk);
  CHECK(entry.out.starts_with("PASS hfm-NxZ"));
  CHECK(call({"gallery", "--entry", "nope"}).code == kExitUsage);
}
