#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cgrem/cli.hpp"
#include "cgrem/error.hpp"

using namespace cgrem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cgrem");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::string temp_file(const std::string& name, const std::string& contents) {
  const std::string path = "cli_test_" + name;
  std::ofstream(path) << contents;
  return path;
}

}  // namespace

TEST_CASE("model specs") {
  CHECK(parse_model("sk").kind() == ModelKind::kSkFull);
  CHECK(parse_model("sk-standard").kind() == ModelKind::kSkStandard);
  CHECK(parse_model("pspin:3").order() == 3);
  const auto mixed = parse_model("mixed:2=0.5,4=0.5");
  CHECK(mixed.kind() == ModelKind::kMixed);
  CHECK(mixed.mixed_weights().weights().size() == 2);
  CHECK_THROWS_AS(parse_model("mixed:2=0.5"), ValidationError);
  CHECK_THROWS_AS(parse_model("pspin"), ValidationError);
  CHECK_THROWS_AS(parse_model("pspin:x"), ValidationError);
  CHECK_THROWS_AS(parse_model("sk:2"), ValidationError);
  CHECK_THROWS_AS(parse_model("potts"), ValidationError);
  try {
    parse_model("mixed:2=0.5,x=0.5");
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("position 12") != std::string::npos);
  }
  for (const char* spec : {"sk", "sk-standard", "rem", "pspin:5", "mixed:2=0.5,4=0.5"}) {
    CHECK(parse_model(parse_model(spec).name()).name() == parse_model(spec).name());
  }

  const std::string tree = temp_file("tree.txt", "2 4\n2 2\n0.5 0.5\n");
  const auto grem = parse_model("grem:" + tree);
  CHECK(grem.tree().size() == 4);
  CHECK_THROWS_AS(parse_model("grem:missing_tree.txt"), ValidationError);
  std::remove(tree.c_str());
}

TEST_CASE("grid specs") {
  const auto g = parse_grid("0.1:0.9:9");
  REQUIRE(g.size() == 9);
  CHECK(g.front() == 0.1);
  CHECK(g.back() == 0.9);
  CHECK(g[4] == doctest::Approx(0.5));
  CHECK(parse_grid("0.5,1,2") == std::vector<double>{0.5, 1.0, 2.0});
  CHECK_THROWS_AS(parse_grid("0:1"), ValidationError);
  CHECK_THROWS_AS(parse_grid("a,b"), ValidationError);
}

TEST_CASE("check reports a violation with a witness") {
  const Result r = invoke({"check", "--model", "pspin:3", "--n", "3"});
  CHECK(r.status == kExitViolation);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "n,partition_mask,n1,max_gap,witness_sigma,witness_tau,verdict");
  CHECK(lines[1].find("VIOLATED") != std::string::npos);
  CHECK(r.out.find("# config: ") != std::string::npos);

  const Result ok = invoke({"check", "--model", "sk", "--n", "4"});
  CHECK(ok.status == kExitPass);
}

TEST_CASE("alpha at beta zero") {
  const Result r = invoke({"alpha", "--model", "rem", "--n", "6", "--beta", "0", "--samples", "10",
                           "--format", "json"});
  REQUIRE(r.status == kExitPass);
  const auto doc = nlohmann::json::parse(r.out);
  const auto& rec = doc["records"][0];
  CHECK(rec["value"].get<double>() == std::log(2.0));
  CHECK(rec["std_error"].get<double>() == 0.0);
  CHECK(rec["verdict"] == "SATISFIED");
  CHECK(doc["config"]["samples"] == 10);
  CHECK(doc["version"] == kToolVersion);
}

TEST_CASE("interp output is reproducible and thread independent") {
  const std::vector<std::string> args = {"interp", "--model", "sk", "--n", "6", "--n1", "3",
                                         "--beta", "1", "--tgrid", "0.1:0.9:9", "--samples",
                                         "400", "--seed", "42"};
  const Result a = invoke(args);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  const Result b = invoke(threaded);
  REQUIRE(a.status == kExitPass);
  CHECK(data_lines(a.out).size() == 10);
  CHECK(a.out == b.out);
  CHECK(a.out == invoke(args).out);
}

TEST_CASE("timing is opt-in") {
  const Result plain = invoke({"psd", "--model", "rem", "--n", "3"});
  CHECK(plain.out.find("wall_clock") == std::string::npos);
  const Result timed = invoke({"psd", "--model", "rem", "--n", "3", "--timing"});
  CHECK(timed.out.find("# wall_clock_seconds: ") != std::string::npos);
}

TEST_CASE("seed comes from the environment when not given") {
  const std::vector<std::string> args = {"sample-dump", "--model", "rem", "--n", "2", "--samples", "2"};
  ::setenv(kSeedEnvironmentVariable, "5", 1);
  const Result env = invoke(args);
  ::unsetenv(kSeedEnvironmentVariable);
  auto explicit_args = args;
  explicit_args.insert(explicit_args.end(), {"--seed", "5"});
  const Result flag = invoke(explicit_args);
  CHECK(env.out == flag.out);
  CHECK(data_lines(env.out).size() == 2);
  CHECK(invoke(args).out != env.out);
}

TEST_CASE("usage and validation errors exit with status 2") {
  CHECK(invoke({}).status == kExitError);
  CHECK(invoke({"frobnicate"}).status == kExitError);
  CHECK(invoke({"check", "--model", "potts", "--n", "3"}).status == kExitError);
  CHECK(invoke({"check", "--model", "sk", "--n", "40"}).status == kExitError);
  CHECK(invoke({"check", "--model", "sk"}).status == kExitError);
  CHECK(invoke({"alpha", "--model", "sk", "--n", "4", "--beta", "x"}).status == kExitError);
  const Result missing = invoke({"grem-verify", "--tree", "no_such_file.txt"});
  CHECK(missing.status == kExitError);
  CHECK(missing.err.find("cannot open") != std::string::npos);
  CHECK(invoke({"--help"}).status == kExitPass);
}

TEST_CASE("grem-verify on the two-layer example") {
  const std::string tree = temp_file("verify.txt", "2 4\n2 2\n0.5 0.5\n");
  const Result r = invoke({"grem-verify", "--tree", tree});
  CHECK(r.status == kExitPass);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("lift_c1") != std::string::npos);
  const Result one = invoke({"grem-verify", "--tree", tree, "--lift", "1,1"});
  CHECK(one.status == kExitPass);
  CHECK(std::count(one.out.begin(), one.out.end(), '\n') < std::count(r.out.begin(), r.out.end(), '\n'));
  std::remove(tree.c_str());
}

TEST_CASE("superadd and output files") {
  const std::string path = "cli_test_superadd.csv";
  const Result r = invoke({"superadd", "--model", "sk", "--n", "4", "--beta", "0.5,1", "--samples",
                           "200", "-o", path});
  CHECK(r.status == kExitPass);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  const auto lines = data_lines(text.str());
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].rfind("model,n,beta,samples,value,std_error,bound,margin,verdict", 0) == 0);
  std::remove(path.c_str());
}
