#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::path(INPHASE_TEST_TMP) / "cli";

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  fs::create_directories(kDir);
  const std::string cmd = std::string("\"") + INPHASE_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string file(const std::string& name) { return (kDir / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("simulate, denoise and eval chain") {
  REQUIRE(run("simulate --kind shear_planes --size 24 24 --sigma 0.5 --seed 3 --amplitude constant --out-truth " +
              file("truth.f64") + " --out-noisy " + file("noisy.cimg") + " --manifest " + file("manifest.txt"))
              .code == 0);
  CHECK(fs::exists(file("truth.f64.hdr")));
  CHECK(slurp(file("manifest.txt")).find("kind=shear_planes") != std::string::npos);

  const Run est = run("noise-est --input " + file("noisy.cimg"));
  CHECK(est.code == 0);
  CHECK(est.out.rfind("sigma=", 0) == 0);

  REQUIRE(run("denoise --input " + file("noisy.cimg") +
              " --self-learn --components 3 --patch-side 4 --nl-window 5 --seed 2 --max-iters 20 --out-phase " +
              file("phase.f64") + " --out-complex " + file("den.cimg") + " --export-png " + file("den.png"))
              .code == 0);
  CHECK(fs::exists(file("den.png")));

  const Run ev = run("eval --est " + file("phase.f64") + " --truth " + file("truth.f64") + " --report " +
                     file("report.txt"));
  CHECK(ev.code == 0);
  CHECK(ev.out.find("\"psnr_db\"") != std::string::npos);
  CHECK(slurp(file("report.txt")).find("psnr_db=") != std::string::npos);
}

TEST_CASE("train and denoise with a stored model") {
  REQUIRE(run("simulate --kind sinusoidal --size 20 20 --sigma 0 --seed 1 --amplitude constant --out-truth " +
              file("t2.f64") + " --out-noisy " + file("clean.cimg"))
              .code == 0);
  REQUIRE(run("simulate --kind sinusoidal --size 20 20 --sigma 0.4 --seed 2 --amplitude constant --out-truth " +
              file("t3.f64") + " --out-noisy " + file("noisy2.cimg"))
              .code == 0);
  REQUIRE(run("train --inputs " + file("clean.cimg") + " --components 2 --sigma 0 --patch-side 4 --seed 1 --out-model " +
              file("m.cmog"))
              .code == 0);
  CHECK(run("denoise --input " + file("noisy2.cimg") + " --model " + file("m.cmog") +
            " --sigma 0.4 --patch-side 4 --nl-window 3 --out-phase " + file("p2.f64") + " --out-complex " +
            file("c2.cimg"))
            .code == 0);
  // Patch side disagrees with the model.
  CHECK(run("denoise --input " + file("noisy2.cimg") + " --model " + file("m.cmog") +
            " --sigma 0.4 --patch-side 5 --out-phase " + file("p3.f64") + " --out-complex " + file("c3.cimg"))
            .code == 2);
}

TEST_CASE("invalid input exits with code 2") {
  CHECK(run("denoise --input " + file("does-not-exist.cimg") + " --self-learn --out-phase " + file("x.f64") +
            " --out-complex " + file("x.cimg"))
            .code == 2);
  CHECK(run("simulate --kind volcano --size 8 8 --sigma 0.1 --out-truth " + file("v.f64") + " --out-noisy " +
            file("v.cimg"))
            .code == 2);
  CHECK(run("simulate --kind sinusoidal --size 8 8 --sigma -1 --out-truth " + file("v.f64") + " --out-noisy " +
            file("v.cimg"))
            .code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("train --inputs " + file("noisy.cimg") + " --components 0 --out-model " + file("z.cmog")).code == 2);
}

TEST_CASE("identical invocations give identical bytes") {
  auto sim = [](const std::string& tag) {
    return run("simulate --kind mountains --size 24 24 --sigma 0.7 --seed 11 --surface-seed 4 --out-truth " +
               file("dt" + tag + ".f64") + " --out-noisy " + file("dn" + tag + ".cimg"))
        .code;
  };
  REQUIRE(sim("a") == 0);
  REQUIRE(sim("b") == 0);
  CHECK(slurp(file("dna.cimg")) == slurp(file("dnb.cimg")));
  auto den = [](const std::string& tag) {
    return run("denoise --input " + file("dna.cimg") +
               " --self-learn --components 3 --patch-side 4 --nl-window 5 --seed 9 --out-phase " +
               file("dp" + tag + ".f64") + " --out-complex " + file("dc" + tag + ".cimg"))
        .code;
  };
  REQUIRE(den("a") == 0);
  REQUIRE(den("b") == 0);
  CHECK(slurp(file("dca.cimg")) == slurp(file("dcb.cimg")));
  CHECK(slurp(file("dpa.f64")) == slurp(file("dpb.f64")));
}
