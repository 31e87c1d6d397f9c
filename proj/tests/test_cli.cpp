#include <array>
#include <cstdio>
#include <string>
#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout only
};

RunResult run(const std::string& args) {
  const std::string cmd =
      std::string(ASTLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe))
    output.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

std::string model(const std::string& rel) {
  return std::string(ASTLAB_MODELS_DIR) + "/" + rel;
}

}  // namespace

TEST_CASE("check passes a valid file with exit 0") {
  RunResult r = run("check " + model("m04_io_system.asl"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("PASS") == 0);
}

TEST_CASE("check fails a structurally broken learning system with exit 1") {
  RunResult r = run("check " + model("failing/f01_nonfunctional.asl"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("FAIL") == 0);
  CHECK(r.output.find("algorithm not a function") != std::string::npos);
}

TEST_CASE("check names the violating data member") {
  RunResult r = run("check " + model("failing/f03_data_carrier.asl"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("data carrier violation") != std::string::npos);
}

TEST_CASE("check reports a failing declared homomorphism") {
  RunResult r = run("check " + model("failing/f02_bad_homo.asl"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("homo HM") != std::string::npos);
}

TEST_CASE("a missing file exits 2") {
  CHECK(run("check /nonexistent/nope.asl").exit_code == 2);
}

TEST_CASE("a parse error exits 2") {
  CHECK(run("check " + model("malformed/b03_unresolved.asl")).exit_code == 2);
}

TEST_CASE("check emits one JSON object with --json") {
  RunResult r = run("--json check " + model("m04_io_system.asl"));
  REQUIRE(r.exit_code == 0);
  auto parsed = nlohmann::json::parse(r.output);
  REQUIRE(parsed.contains("files"));
  CHECK(parsed["files"][0]["status"] == "pass");
}

TEST_CASE("homo finds the identity on a system and itself") {
  RunResult r =
      run("homo " + model("m04_io_system.asl") + " --from S --to S");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("FOUND") == 0);
  CHECK(r.output.find("rho 0 { a -> a, b -> b }") != std::string::npos);
  CHECK(r.output.find("theta 1 { y0 -> y0 }") != std::string::npos);
}

TEST_CASE("homo prints NONE for a strictly larger target") {
  RunResult r =
      run("homo " + model("m05_empty_relation.asl") + " --from E --to E");
  CHECK(r.exit_code == 0);  // identity exists on the empty relation
  r = run("homo " + model("m16_quotient_homo.asl") + " --from S2 --to S1");
  CHECK(r.exit_code == 1);
  CHECK(r.output == "NONE\n");
}

TEST_CASE("homo agrees with a declared quotient morphism") {
  RunResult r =
      run("homo " + model("m16_quotient_homo.asl") + " --from S1 --to S2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("FOUND") == 0);
}

TEST_CASE("homo reports budget exhaustion distinctly") {
  RunResult r = run("homo " + model("m16_quotient_homo.asl") +
                    " --from S1 --to S2 --budget-assignments 1");
  CHECK(r.exit_code == 1);
  CHECK(r.output == "BUDGET\n");
}

TEST_CASE("homo with an unresolved name exits 2") {
  RunResult r =
      run("homo " + model("m04_io_system.asl") + " --from S --to nope");
  CHECK(r.exit_code == 2);
}

TEST_CASE("homo --json carries the morphism") {
  RunResult r = run("--json homo " + model("m04_io_system.asl") +
                    " --from S --to S");
  REQUIRE(r.exit_code == 0);
  auto parsed = nlohmann::json::parse(r.output);
  CHECK(parsed["outcome"] == "found");
  CHECK(parsed["maps"][0]["role"] == "rho");
  CHECK(parsed["maps"][1]["role"] == "theta");
}

TEST_CASE("compose parallel emits an extended canonical model") {
  RunResult r = run("compose " + model("m11_parallel.asl") +
                    " S1 S2 --op parallel --as PP");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("system PP : ") != std::string::npos);
  CHECK(r.output.find("((a, u), (b, v))") != std::string::npos);
}

TEST_CASE("compose cascade joins on the bound coordinate") {
  RunResult r = run("compose " + model("m12_cascade.asl") +
                    " F G --op cascade --z-left 1 --z-right 0 --as CC");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("system CC : ") != std::string::npos);
}

TEST_CASE("compose cascade with mismatched Z exits 1") {
  RunResult r = run("compose " + model("m12_cascade.asl") +
                    " G F --op cascade --z-left 2 --z-right 0 --as CC");
  CHECK(r.exit_code == 1);
}

TEST_CASE("compose with an unresolved operand exits 2") {
  RunResult r = run("compose " + model("m11_parallel.asl") +
                    " S1 nope --op parallel --as PP");
  CHECK(r.exit_code == 2);
}

TEST_CASE("theorems run deterministically and pass") {
  RunResult first = run("theorems --only T2 --trials 5 --seed 9");
  RunResult second = run("theorems --only T2 --trials 5 --seed 9");
  CHECK(first.exit_code == 0);
  CHECK(first.output == second.output);
  CHECK(first.output.find("[T2] trials=5 passes=5") == 0);
}

TEST_CASE("theorems with singleton sizes pass a single trial") {
  RunResult r = run(
      "theorems --only T2 --trials 1 --min-size 1 --max-size 1 --seed 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("passes=1") != std::string::npos);
}

TEST_CASE("theorems --mutate reports failures and exits 1") {
  RunResult r = run("theorems --trials 2 --max-size 2 --mutate --seed 5");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("failures=2") != std::string::npos);
}

TEST_CASE("out-of-bounds sizes exit 2") {
  CHECK(run("theorems --max-size 9").exit_code == 2);
  CHECK(run("theorems --only T9").exit_code == 2);
}

TEST_CASE("theorems --json is a single object") {
  RunResult r = run("--json theorems --only T3 --trials 3 --seed 11");
  REQUIRE(r.exit_code == 0);
  auto parsed = nlohmann::json::parse(r.output);
  CHECK(parsed["reports"][0]["theorem"] == "T3");
  CHECK(parsed["reports"][0]["passes"] == 3);
}

TEST_CASE("dot renders the elementary and cascade levels") {
  RunResult elementary = run("dot " + model("m07_learning.asl") +
                             " L --level elementary");
  CHECK(elementary.exit_code == 0);
  CHECK(elementary.output.find("digraph") == 0);
  RunResult cascade = run("dot " + model("m07_learning.asl") + " L");
  CHECK(cascade.exit_code == 0);
  CHECK(cascade.output.find("\"A\" -> \"P\"") != std::string::npos);
}

TEST_CASE("dot with a bad target exits 2") {
  CHECK(run("dot " + model("m07_learning.asl") + " nope").exit_code == 2);
}

TEST_CASE("unknown flags exit 2") {
  CHECK(run("homo --frobnicate").exit_code == 2);
  CHECK(run("").exit_code == 2);
}

TEST_CASE("ASTLAB_MAX_RELATION caps declared relations") {
  const std::string cmd = "ASTLAB_MAX_RELATION=1 " +
                          std::string(ASTLAB_CLI_PATH) + " check " +
                          model("m04_io_system.asl") + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe))
    output.append(buf.data(), n);
  const int status = pclose(pipe);
  CHECK(WEXITSTATUS(status) == 2);
  CHECK(output.find("size cap") != std::string::npos);
}
