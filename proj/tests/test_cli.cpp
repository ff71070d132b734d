// Copyright (c) the qpeg project authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>

#include "qpeg/image.hpp"
#include "support/synthetic.hpp"

#ifndef QPEG_CLI_BINARY
#error "QPEG_CLI_BINARY must point at the command-line tool"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

struct CliFixture {
  fs::path dir;

  CliFixture() {
    dir = fs::temp_directory_path() / ("qpeg_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~CliFixture() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  fs::path path(const std::string& name) const { return dir / name; }

  RunResult run(const std::string& args) const {
    const fs::path log = dir / "run.log";
    const std::string cmd =
        std::string(QPEG_CLI_BINARY) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    result.output = text.str();
    return result;
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

TEST_CASE("cli psnr of an image with itself prints inf", "[cli]") {
  CliFixture fx;
  const auto img = qpeg_test::synthetic_photo(16, 16);
  qpeg::save_pgm(img, fx.path("a.pgm").string());

  const RunResult r = fx.run("psnr " + fx.path("a.pgm").string() + " " + fx.path("a.pgm").string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("psnr_db=inf") != std::string::npos);
}

TEST_CASE("cli lossless round trip preserves the file byte for byte", "[cli]") {
  CliFixture fx;
  qpeg::save_pgm(qpeg_test::random_image(16, 16, 77), fx.path("in.pgm").string());

  REQUIRE(fx.run("compress --lossless " + fx.path("in.pgm").string() + " " +
                 fx.path("in.qpg").string())
              .exit_code == 0);
  REQUIRE(fx.run("decompress " + fx.path("in.qpg").string() + " " + fx.path("out.pgm").string())
              .exit_code == 0);
  CHECK(read_file(fx.path("out.pgm")) == read_file(fx.path("in.pgm")));
}

TEST_CASE("cli compresses a 243x243 image with ternary addressing", "[cli]") {
  CliFixture fx;
  qpeg::save_pgm(qpeg_test::synthetic_photo(243, 243), fx.path("photo.pgm").string());

  const RunResult c = fx.run("compress --chi 1 --branch 3 --levels 4 " +
                             fx.path("photo.pgm").string() + " " + fx.path("photo.qpg").string());
  REQUIRE(c.exit_code == 0);
  CHECK(c.output.find("boxes=9") != std::string::npos);

  const RunResult i = fx.run("info " + fx.path("photo.qpg").string());
  REQUIRE(i.exit_code == 0);
  CHECK(i.output.find("branch=3") != std::string::npos);
  CHECK(i.output.find("levels=4") != std::string::npos);
  CHECK(i.output.find("box_side=81") != std::string::npos);
  // chi = 1 product states: 4 sites of 9 values per box.
  CHECK(i.output.find("box_0_params_uniform=36") != std::string::npos);
  CHECK(i.output.find("box_0_params_actual=36") != std::string::npos);
  CHECK(i.output.find("total_params_uniform=324") != std::string::npos);

  const RunResult d =
      fx.run("decompress " + fx.path("photo.qpg").string() + " " + fx.path("out.pgm").string());
  REQUIRE(d.exit_code == 0);
  const RunResult p =
      fx.run("psnr " + fx.path("photo.pgm").string() + " " + fx.path("out.pgm").string());
  CHECK(p.exit_code == 0);
  CHECK(p.output.find("psnr_db=") != std::string::npos);
}

TEST_CASE("cli entropy prints one value per cut", "[cli]") {
  CliFixture fx;
  qpeg::save_pgm(qpeg_test::synthetic_photo(16, 16), fx.path("a.pgm").string());
  const RunResult r = fx.run("entropy " + fx.path("a.pgm").string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("S_1=") != std::string::npos);
  CHECK(r.output.find("S_3=") != std::string::npos);
}

TEST_CASE("cli usage errors exit with 1", "[cli]") {
  CliFixture fx;
  qpeg::save_pgm(qpeg_test::random_image(16, 16, 5), fx.path("a.pgm").string());

  CHECK(fx.run("compress --frobnicate " + fx.path("a.pgm").string() + " " +
               fx.path("a.qpg").string())
            .exit_code == 1);
  CHECK(fx.run("compress " + fx.path("missing.pgm").string() + " " + fx.path("a.qpg").string())
            .exit_code == 1);
  CHECK(fx.run("").exit_code == 1);
}

TEST_CASE("cli data errors exit with 2", "[cli]") {
  CliFixture fx;
  qpeg::save_pgm(qpeg_test::random_image(16, 16, 5), fx.path("a.pgm").string());
  qpeg::save_pgm(qpeg_test::random_image(8, 8, 6), fx.path("b.pgm").string());

  // A PGM file is not a coefficient container.
  const RunResult info = fx.run("info " + fx.path("a.pgm").string());
  CHECK(info.exit_code == 2);
  CHECK(info.output.find("error:") != std::string::npos);

  // Bond budget beyond chi_max for the default 16x16 geometry.
  CHECK(fx.run("compress --chi 99 " + fx.path("a.pgm").string() + " " + fx.path("a.qpg").string())
            .exit_code == 2);

  // Mismatched dimensions for psnr.
  CHECK(fx.run("psnr " + fx.path("a.pgm").string() + " " + fx.path("b.pgm").string())
            .exit_code == 2);

  // Corrupted container payload.
  REQUIRE(fx.run("compress " + fx.path("a.pgm").string() + " " + fx.path("a.qpg").string())
              .exit_code == 0);
  std::string bytes = read_file(fx.path("a.qpg"));
  bytes.resize(bytes.size() / 2);
  std::ofstream(fx.path("trunc.qpg"), std::ios::binary) << bytes;
  CHECK(fx.run("decompress " + fx.path("trunc.qpg").string() + " " + fx.path("t.pgm").string())
            .exit_code == 2);
}
