// End-to-end checks of the installed command-line surface: subcommand
// plumbing, exit codes per error class, file-only stage isolation.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "relight/image_io.hpp"
#include "relight/radiometry.hpp"
#include "test_support.hpp"

using namespace relight;
using testsupport::TempDir;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(RELIGHT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli("") == 1);
    CHECK(run_cli("no-such-subcommand") != 0);
}

TEST_CASE("oracle-brackets, fuse and stitch round trip on disk") {
    TempDir dir("cli");
    // Smooth HDR with a hot region; peak 12x the clip level.
    LinearImage hdr = testsupport::analytic_equirect(64, 32, [](const Vec3& d) {
        const float t = std::max(0.f, d.y);
        const float v = 0.1f + 12.f * t * t;
        return Vec3{v, v, v};
    });
    write_exr(dir.file("hdr.exr"), hdr);

    CHECK(run_cli("--out-dir " + dir.path().string() +
                  " oracle-brackets --hdr " + dir.file("hdr.exr") +
                  " --ev 0 --ev -2 --ev -4") == 0);
    REQUIRE(std::filesystem::exists(dir.file("bracket_ev+0.png")));
    REQUIRE(std::filesystem::exists(dir.file("bracket_ev-2.png")));
    REQUIRE(std::filesystem::exists(dir.file("bracket_ev-4.png")));

    CHECK(run_cli("--out-dir " + dir.path().string() + " fuse --bracket " +
                  dir.file("bracket_ev-4.png") + ":-4 --bracket " +
                  dir.file("bracket_ev-2.png") + ":-2 --bracket " +
                  dir.file("bracket_ev+0.png") + ":0 --out fused.exr") == 0);
    const LinearImage fused = read_exr(dir.file("fused.exr"));
    const ScalarRaster truth = luminance(hdr);
    const ScalarRaster got = luminance(fused);
    for (std::size_t i = 0; i < truth.data.size(); ++i) {
        const float rel = std::fabs(got.data[i] - truth.data[i]) /
                          std::max(truth.data[i], 1e-6f);
        // PNG quantization dominates; 5% relative is ample to expose
        // wiring mistakes while tolerating 8-bit storage.
        CHECK(rel <= 0.05f);
    }

    // Stitch six uniform faces into an EXR panorama.
    for (const char* name : {"px", "nx", "py", "ny", "pz", "nz"})
        write_exr(dir.file(std::string(name) + ".exr"),
                  LinearImage(8, 8, 3, 0.25f));
    CHECK(run_cli("--out-dir " + dir.path().string() + " stitch --posx " +
                  dir.file("px.exr") + " --negx " + dir.file("nx.exr") +
                  " --posy " + dir.file("py.exr") + " --negy " +
                  dir.file("ny.exr") + " --posz " + dir.file("pz.exr") +
                  " --negz " + dir.file("nz.exr") +
                  " --width 32 --out pano.exr") == 0);
    const LinearImage pano = read_exr(dir.file("pano.exr"));
    CHECK(pano.width == 32);
    CHECK(pano.height == 16);
    for (float v : pano.data) CHECK(v == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("exit codes map to error classes") {
    TempDir dir("clierr");
    // Missing bracket file -> io error (3).
    CHECK(run_cli("fuse --bracket " + dir.file("absent.png") +
                  ":0 --out " + dir.file("f.exr")) == 3);
    // Malformed bracket spec -> invalid input (2).
    write_png(dir.file("b.png"), SrgbImage(4, 2, 3, 0.5f));
    CHECK(run_cli("fuse --bracket " + dir.file("b.png") +
                  " --out " + dir.file("f.exr")) == 2);
    // Broken scene file -> scene parse error (4).
    {
        std::ofstream out(dir.file("scene.json"));
        out << "{\"unknown_key\": true}";
    }
    CHECK(run_cli("render --scene " + dir.file("scene.json")) == 4);
}

TEST_CASE("pipeline subcommand writes a manifest and composites") {
    TempDir dir("clipipe");
    const std::string scene = testsupport::write_demo_scene(dir.path(), [] {
        testsupport::DemoSceneConfig cfg;
        cfg.cam_width = 32;
        cfg.cam_height = 24;
        cfg.spp = 4;
        return cfg;
    }());
    const std::string out_dir = dir.file("run");
    CHECK(run_cli("--threads 2 --out-dir " + out_dir + " pipeline --scene " +
                  scene + " --cubemap-res 16 --pano-width 64") == 0);
    for (const char* f :
         {"manifest.json", "fused.exr", "panorama_ev0.png", "r0_cam0.exr",
          "r1_cam0.exr", "object_cam0.exr", "composite_cam0.png"})
        CHECK(std::filesystem::exists(std::filesystem::path(out_dir) / f));

    // External mode with a missing bracket aborts with the stage error code.
    CHECK(run_cli("--out-dir " + dir.file("run2") + " pipeline --scene " +
                  scene + " --mode external --bracket " +
                  dir.file("nope.png") + ":0") == 5);
}

TEST_CASE("composite and eval subcommands") {
    TempDir dir("clicomp");
    write_exr(dir.file("r0.exr"), LinearImage(16, 16, 3, 0.5f));
    write_exr(dir.file("r1.exr"), LinearImage(16, 16, 3, 0.25f));
    LinearImage obj(16, 16, 4, 0.f);
    write_exr(dir.file("obj.exr"), obj);
    write_png(dir.file("bg.png"), SrgbImage(16, 16, 3, 0.6f));
    CHECK(run_cli("--out-dir " + dir.path().string() +
                  " composite --r0 " + dir.file("r0.exr") + " --r1 " +
                  dir.file("r1.exr") + " --object " + dir.file("obj.exr") +
                  " --background " + dir.file("bg.png") +
                  " --out comp.png") == 0);
    const SrgbImage comp = read_png(dir.file("comp.png"));
    // Uniform half shadow darkens the background everywhere.
    for (float v : comp.data) CHECK(v < 0.6f);

    CHECK(run_cli("eval --pred " + dir.file("bg.png") + " --ref " +
                  dir.file("bg.png") + " --pos-score 1 --neg-score 3") == 0);
    // Directory pairing with a missing counterpart is an input error.
    std::filesystem::create_directories(dir.file("preds"));
    std::filesystem::create_directories(dir.file("refs"));
    write_png(dir.file("preds") + "/a.png", SrgbImage(16, 16, 3, 0.3f));
    CHECK(run_cli("eval --pred " + dir.file("preds") + " --ref " +
                  dir.file("refs")) == 2);
}
