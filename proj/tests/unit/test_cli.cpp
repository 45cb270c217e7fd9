// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(USI_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

class Workdir {
 public:
  Workdir() : dir_(fs::temp_directory_path() / ("usi_cli_test_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
    write("t.txt", "ATACCCCGATAATACCCCAG");
    write("w.txt", ".9\n1\n3\n2\n.7\n1\n1\n.6\n.5\n.5\n.5\n.8\n1\n1\n1\n.9\n1\n1\n.8\n1\n");
    write("banana.txt", "banana");
    write("banana.w", "1\n1\n1\n1\n1\n1\n");
  }
  ~Workdir() { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& data) const {
    std::ofstream(dir_ / name, std::ios::binary) << data;
  }

 private:
  fs::path dir_;
};

}  // namespace

TEST_CASE("build and query the running example") {
  Workdir w;
  auto r = run("build --text " + w.path("t.txt") + " --weights " + w.path("w.txt") +
               " --k 1000 --out " + w.path("big.usi"));
  REQUIRE(r.code == 0);
  const auto info = nlohmann::json::parse(r.out);
  CHECK(info["n"] == 20);
  r = run("build --text " + w.path("t.txt") + " --weights " + w.path("w.txt") + " --k 0 --out " +
          w.path("none.usi"));
  REQUIRE(r.code == 0);

  for (const char* index : {"big.usi", "none.usi"}) {
    r = run("query --index " + w.path(index) + " --pattern TACCCC");
    CHECK(r.code == 0);
    CHECK(r.out == "14.6\n");
  }
  r = run("query --index " + w.path("big.usi") + " --pattern GG");
  CHECK(r.out == "0\n");
  for (const char* engine : {"bsl1", "bsl2", "bsl3", "bsl4"}) {
    r = run("query --index " + w.path("big.usi") + " --engine " + engine + " --pattern TACCCC");
    CHECK(r.out == "14.6\n");
  }

  w.write("pats.txt", "TACCCC\nGG\nA\n");
  r = run("query --index " + w.path("big.usi") + " --patterns-file " + w.path("pats.txt") +
          " --format json --show-hit");
  REQUIRE(r.code == 0);
  const auto answers = nlohmann::json::parse(r.out);
  REQUIRE(answers.size() == 3);
  CHECK(answers[0]["pattern"] == "TACCCC");
  CHECK(answers[0]["value"].get<double>() == doctest::Approx(14.6).epsilon(1e-12));
  CHECK(answers[0]["hit"] == true);
  CHECK(answers[1]["value"].get<double>() == 0.0);
}

TEST_CASE("undefined utilities print null") {
  Workdir w;
  REQUIRE(run("build --text " + w.path("t.txt") + " --weights " + w.path("w.txt") +
              " --k 3 --utility min-of-sum --out " + w.path("m.usi"))
              .code == 0);
  CHECK(run("query --index " + w.path("m.usi") + " --pattern GG").out == "null\n");
  CHECK(run("query --index " + w.path("m.usi") + " --pattern TACCCC").out == "5.9\n");
}

TEST_CASE("tune and mine") {
  Workdir w;
  REQUIRE(run("build --text " + w.path("banana.txt") + " --weights " + w.path("banana.w") +
              " --k 2 --out " + w.path("b.usi"))
              .code == 0);
  auto j = nlohmann::json::parse(run("tune --index " + w.path("b.usi") + " --k 3").out);
  CHECK(j["tau_k"] == 2);
  CHECK(j["l_k"] == 2);
  j = nlohmann::json::parse(run("tune --index " + w.path("b.usi") + " --tau 2").out);
  CHECK(j["k_tau"] == 5);
  CHECK(j["l_tau"] == 3);

  auto r = run("mine --text " + w.path("banana.txt") + " --k 3");
  REQUIRE(r.code == 0);
  CHECK(r.out == "witness_pos,length,est_freq,substring\n5,1,3,a\n4,1,2,n\n4,2,2,na\n");
  r = run("mine --text " + w.path("banana.txt") + " --k 2 --engine approx --s 2");
  CHECK(r.out.find(",1,3,a\n") != std::string::npos);
  w.write("aaaa.txt", "aaaa");
  r = run("mine --text " + w.path("aaaa.txt") + " --k 4 --engine tktrie");
  CHECK(r.out == "witness_pos,length,est_freq,substring\n3,1,4,a\n2,2,3,aa\n1,3,2,aaa\n0,4,1,aaaa\n");
  r = run("eval --text " + w.path("banana.txt") + " --k 3 --engine approx --s 1");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["accuracy_true_freq"] == 100.0);
}

TEST_CASE("workload, bench and corpus commands") {
  Workdir w;
  REQUIRE(run("gen-corpus --n 20000 --text-out " + w.path("c.txt") + " --weights-out " + w.path("c.w")).code == 0);
  CHECK(fs::file_size(w.path("c.txt")) == 20000);
  REQUIRE(run("build --text " + w.path("c.txt") + " --weights " + w.path("c.w") + " --k 200 --out " +
              w.path("c.usi"))
              .code == 0);
  REQUIRE(run("gen-workload --index " + w.path("c.usi") + " --out " + w.path("q.txt") +
              " --queries 500 --max-length 50")
              .code == 0);
  auto r = run("bench --index " + w.path("c.usi") + " --workload " + w.path("q.txt"));
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("engine,workload,K,s,n,metric,value\n", 0) == 0);
  for (const char* e : {"usi,", "bsl1,", "bsl2,", "bsl3,", "bsl4,"})
    CHECK(r.out.find(std::string("\n") + e) != std::string::npos);
}

TEST_CASE("exit codes") {
  Workdir w;
  CHECK(run("--bogus").code == 1);
  CHECK(run("query --index " + w.path("missing.usi") + " --pattern A").code == 2);
  CHECK(run("build --text " + w.path("t.txt") + " --weights " + w.path("w.txt") +
            " --k 3 --utility nope --out " + w.path("x.usi"))
            .code == 1);
  w.write("short.w", "1\n2\n");
  CHECK(run("build --text " + w.path("t.txt") + " --weights " + w.path("short.w") + " --k 3 --out " +
            w.path("x.usi"))
            .code == 2);
  w.write("junk.usi", "garbage");
  CHECK(run("query --index " + w.path("junk.usi") + " --pattern A").code == 2);
}
