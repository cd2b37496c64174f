#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "dlau/cli.hpp"
#include "dlau/tensor_file.hpp"

using namespace dlau;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = execute_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("dlau_cli_test_" + std::to_string(::getpid()));
  Scratch() { fs::create_directories(dir); }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("resources prints the prototype totals") {
  const auto r = run({"resources", "--tile-size", "32"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("Total,35,167,NA,NA") != std::string::npos);
}

TEST_CASE("sweep reports a T=8 over T=32 ratio between 3 and 4") {
  const auto r = run({"sweep", "--sizes", "128", "--tiles", "8,32", "--seed", "7"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string line;
  double ratio = -1.0;
  while (std::getline(in, line)) {
    if (line.rfind("n128_t8,", 0) == 0) ratio = std::stod(line.substr(line.rfind(',') + 1));
  }
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 4.0);
  // Parallel workers must not change the report.
  CHECK(run({"sweep", "--sizes", "128", "--tiles", "8,32", "--seed", "7", "--jobs", "1"}).out ==
        r.out);
}

TEST_CASE("gen then run on zero input yields one half") {
  Scratch s;
  REQUIRE(run({"gen", "--rows", "16", "--cols", "4", "--seed", "3", "--out", s / "w.dlt"}).code ==
          kExitOk);
  REQUIRE(run({"gen", "--rows", "2", "--cols", "16", "--zeros", "--out", s / "x.dlt"}).code ==
          kExitOk);
  const auto r = run({"run", "--weights", s / "w.dlt", "--input", s / "x.dlt", "--tile-size", "4",
                      "--out", s / "y.dlt", "--check"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("max_abs_diff,0") != std::string::npos);
  const Tensor2D y = read_tensor(s / "y.dlt");
  CHECK(y.rows() == 2);
  CHECK(y.cols() == 4);
  for (float v : y.values()) CHECK(v == 0.5f);
}

TEST_CASE("outputs are byte-identical across invocations") {
  Scratch s;
  for (const char* name : {"a", "b"}) {
    const std::string n(name);
    REQUIRE(run({"gen", "--rows", "32", "--cols", "8", "--seed", "5", "--out", s / (n + ".dlt")})
                .code == kExitOk);
    REQUIRE(run({"sim", "--ni", "32", "--no", "8", "--batch", "2", "--tile-size", "8",
                 "--dma-bw", "3", "--out", s / (n + "_y.dlt"), "--stats-out",
                 s / (n + ".csv")})
                .code == kExitOk);
  }
  CHECK(slurp(s / "a.dlt") == slurp(s / "b.dlt"));
  CHECK(slurp(s / "a_y.dlt") == slurp(s / "b_y.dlt"));
  CHECK(slurp(s / "a.csv") == slurp(s / "b.csv"));
  CHECK(slurp(s / "a.csv").rfind("Ni,No,batch,", 0) == 0);
}

TEST_CASE("sim reads a config file with flag overrides") {
  Scratch s;
  {
    std::ofstream os(s / "run.cfg");
    os << "# small layer\nni = 64\nno = 64\ntile_size = 8\n";
  }
  const auto r = run({"sim", "--config", s / "run.cfg", "--tile-size", "32"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("\n64,64,1,32,64,32,204,128,0,128,") != std::string::npos);
}

TEST_CASE("profile reports matrix-multiply dominance") {
  const auto r = run({"profile", "--workload", "bp", "--layers", "64,64"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("workload,layers,batch,mm_ops,", 0) == 0);
  CHECK(r.out.find("\nbp,64-64,1,") != std::string::npos);
}

TEST_CASE("usage and configuration errors exit with 2") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"sim", "--ni", "8"}).code == kExitUsage);
  const auto banana = run({"sim", "--ni", "8", "--no", "8", "--tile-size", "banana"});
  CHECK(banana.code == kExitUsage);
  CHECK(banana.err.find("tile_size") != std::string::npos);
  CHECK(run({"sim", "--ni", "8", "--no", "8", "--pwl-k", "0.3"}).code == kExitUsage);
  CHECK(run({"profile", "--workload", "nope"}).code == kExitUsage);
  CHECK(run({"resources", "--tile-size", "0"}).code == kExitUsage);
}

TEST_CASE("input file errors exit with 3") {
  Scratch s;
  CHECK(run({"run", "--weights", s / "missing.dlt", "--input", s / "missing.dlt"}).code ==
        kExitInputFile);
  CHECK(run({"sim", "--config", s / "missing.cfg"}).code == kExitInputFile);
  {
    std::ofstream os(s / "bad.dlt", std::ios::binary);
    os << "not a tensor";
  }
  CHECK(run({"run", "--weights", s / "bad.dlt", "--input", s / "bad.dlt"}).code ==
        kExitInputFile);
  REQUIRE(run({"gen", "--rows", "4", "--cols", "2", "--out", s / "w.dlt"}).code == kExitOk);
  REQUIRE(run({"gen", "--rows", "1", "--cols", "3", "--out", s / "x.dlt"}).code == kExitOk);
  const auto mismatch = run({"run", "--weights", s / "w.dlt", "--input", s / "x.dlt"});
  CHECK(mismatch.code == kExitInputFile);
  CHECK_FALSE(mismatch.err.empty());
}
