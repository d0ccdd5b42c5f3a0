#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "boundarykit/edges.hpp"
#include "boundarykit/png_io.hpp"
#include "boundarykit/tensor_io.hpp"
#include "boundarykit/warp.hpp"
#include "testutil.hpp"

using namespace bk;
using nlohmann::json;

namespace {

std::string binary() {
    const char* env = std::getenv("BOUNDARYKIT_BIN");
    REQUIRE_MESSAGE(env != nullptr, "BOUNDARYKIT_BIN must point at the CLI binary");
    return env;
}

int run(const std::string& args, const std::string& log = "/dev/null",
        const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + binary() + " " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json slurp_json(const std::string& path) { return json::parse(slurp(path)); }

} // namespace

TEST_CASE("selfcheck passes") {
    testutil::TempDir tmp("cli_selfcheck");
    const std::string log = tmp.file("selfcheck.log");
    CHECK(run("selfcheck", log) == 0);
    const std::string out = slurp(log);
    CHECK(out.find("[PASS]") != std::string::npos);
    CHECK(out.find("[FAIL]") == std::string::npos);
}

TEST_CASE("edges extract matches the library") {
    testutil::TempDir tmp("cli_edges");
    LabelMap labels(8, 8, 2);
    for (int y = 0; y < 8; ++y)
        for (int x = 4; x < 8; ++x) labels.at(y, x) = 1;
    write_label_png(labels, tmp.file("labels.png"));

    CHECK(run("edges extract --labels " + tmp.file("labels.png") + " --out " +
              tmp.file("edges.png") + " --method neighbor") == 0);
    const BinaryMask got = read_mask_png(tmp.file("edges.png"));
    CHECK(got.bits == extract_semantic_edges(labels, {}).bits);

    CHECK(run("edges extract --labels " + tmp.file("labels.png") + " --out " +
              tmp.file("canny.png") + " --method canny") == 0);
    CHECK(read_mask_png(tmp.file("canny.png")).count_true() > 0);
}

TEST_CASE("warp apply reproduces the library result bit-exactly") {
    testutil::TempDir tmp("cli_warp");
    bk::Rng rng(5);
    const FeatureMap f = testutil::random_features(rng, 3, 6, 7);
    const DisplacementField d = testutil::random_disp(rng, 6, 7, -2.0, 2.0);
    write_tensor(f, tmp.file("f.bwtf"));
    write_tensor(d, tmp.file("d.bwtf"));

    CHECK(run("warp apply --features " + tmp.file("f.bwtf") + " --disp " +
              tmp.file("d.bwtf") + " --out " + tmp.file("out.bwtf")) == 0);
    CHECK(read_feature_map(tmp.file("out.bwtf")).data == warp(f, d, {}).data);

    CHECK(run("warp apply --features " + tmp.file("f.bwtf") + " --disp " +
              tmp.file("d.bwtf") + " --out " + tmp.file("outz.bwtf") +
              " --border zeros") == 0);
    CHECK(read_feature_map(tmp.file("outz.bwtf")).data ==
          warp(f, d, {BorderMode::Zeros}).data);
}

TEST_CASE("warp gradcheck exits zero and reports the error") {
    testutil::TempDir tmp("cli_gradcheck");
    const std::string log = tmp.file("gc.log");
    CHECK(run("warp gradcheck --seed 11 --eps 1e-3 --tol 1e-3", log) == 0);
    CHECK(slurp(log).find("worst rel err") != std::string::npos);
}

TEST_CASE("augment paste is deterministic and reports its choices") {
    testutil::TempDir tmp("cli_augment");
    bk::Rng rng(9);
    const int h = 24, w = 24;
    LabelMap pseudo(h, w, 19, 255, 0);
    for (int y = 4; y < 16; ++y)
        for (int x = 6; x < 18; ++x) pseudo.at(y, x) = 11;
    const LabelMap dest_labels(h, w, 19, 255, 2);
    write_label_png(pseudo, tmp.file("tp.png"));
    write_label_png(dest_labels, tmp.file("dl.png"));
    write_rgb_png(testutil::random_image(rng, h, w), tmp.file("ti.png"));
    write_rgb_png(testutil::random_image(rng, h, w), tmp.file("di.png"));

    const std::string base = "augment paste --target-img " + tmp.file("ti.png") +
                             " --target-pseudo " + tmp.file("tp.png") + " --dest-img " +
                             tmp.file("di.png") + " --dest-labels " + tmp.file("dl.png") +
                             " --classes 11 --subset-size 1 --erode-side 5 --seed 21";

    CHECK(run(base + " --out-img " + tmp.file("a.png") + " --out-labels " +
              tmp.file("al.png") + " --report " + tmp.file("a.json")) == 0);
    CHECK(run(base + " --out-img " + tmp.file("b.png") + " --out-labels " +
              tmp.file("bl.png") + " --report " + tmp.file("b.json")) == 0);

    CHECK(slurp(tmp.file("a.png")) == slurp(tmp.file("b.png")));
    CHECK(slurp(tmp.file("al.png")) == slurp(tmp.file("bl.png")));

    const json report = slurp_json(tmp.file("a.json"));
    REQUIRE(report.at("chosen").size() == 1);
    CHECK(report.at("chosen")[0].at("class") == 11);
    CHECK(report.at("pasted_pixels").get<int>() == 8 * 8); // 12x12 block eroded by 5x5

    const LabelMap out = read_label_png(tmp.file("al.png"), 19);
    std::size_t pasted = 0;
    for (auto v : out.data) pasted += v == 11;
    CHECK(pasted == 64);
}

TEST_CASE("augment paste on the bundled demo pair is reproducible") {
    const char* demo = std::getenv("BOUNDARYKIT_DEMO");
    REQUIRE_MESSAGE(demo != nullptr, "BOUNDARYKIT_DEMO must point at assets/demo");
    const std::string d(demo);
    testutil::TempDir tmp("cli_demo");

    const std::string base = "augment paste --target-img " + d + "/target.png" +
                             " --target-pseudo " + d + "/target_pseudo.png" +
                             " --dest-img " + d + "/dest.png" + " --dest-labels " + d +
                             "/dest_labels.png --classes 5,11,13 --erode-side 5 --seed 42";

    CHECK(run(base + " --out-img " + tmp.file("a.png") + " --out-labels " +
              tmp.file("al.png") + " --report " + tmp.file("a.json")) == 0);
    CHECK(run(base + " --out-img " + tmp.file("b.png") + " --out-labels " +
              tmp.file("bl.png") + " --report " + tmp.file("b.json")) == 0);

    CHECK(slurp(tmp.file("a.png")) == slurp(tmp.file("b.png")));
    CHECK(slurp(tmp.file("al.png")) == slurp(tmp.file("bl.png")));

    const json report = slurp_json(tmp.file("a.json"));
    CHECK(report.at("pasted_pixels").get<int>() > 0);
    const LabelMap out = read_label_png(tmp.file("al.png"), 19);
    const LabelMap dest = read_label_png(d + "/dest_labels.png", 19);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < out.data.size(); ++i) changed += out.data[i] != dest.data[i];
    CHECK(changed == std::size_t(report.at("pasted_pixels").get<int>()));
}

TEST_CASE("augment batch processes a manifest deterministically") {
    testutil::TempDir tmp("cli_batch");
    bk::Rng rng(13);
    for (int i = 0; i < 2; ++i) {
        const std::string s = std::to_string(i);
        LabelMap pseudo = testutil::random_labels(rng, 20, 20, 19, 6);
        for (int y = 5; y < 15; ++y)
            for (int x = 5; x < 15; ++x) pseudo.at(y, x) = 13;
        write_label_png(pseudo, tmp.file("tp" + s + ".png"));
        write_label_png(LabelMap(20, 20, 19, 255, 0), tmp.file("dl" + s + ".png"));
        write_rgb_png(testutil::random_image(rng, 20, 20), tmp.file("ti" + s + ".png"));
        write_rgb_png(testutil::random_image(rng, 20, 20), tmp.file("di" + s + ".png"));
    }
    {
        std::ofstream m(tmp.file("manifest.tsv"));
        for (int i = 0; i < 2; ++i) {
            const std::string s = std::to_string(i);
            m << tmp.file("ti" + s + ".png") << '\t' << tmp.file("tp" + s + ".png") << '\t'
              << tmp.file("di" + s + ".png") << '\t' << tmp.file("dl" + s + ".png") << '\t'
              << "pair" << s << '\n';
        }
    }

    // identical results regardless of the worker-thread schedule
    const std::string cmd = "augment batch --manifest " + tmp.file("manifest.tsv") +
                            " --classes 13 --subset-size 1 --seed 3 --out-dir ";
    CHECK(run(cmd + tmp.file("out1")) == 0);
    CHECK(run(cmd + tmp.file("out2"), "/dev/null", "BOUNDARYKIT_THREADS=1 ") == 0);

    for (const char* stem : {"pair0", "pair1"}) {
        const std::string leaf = std::string(stem) + ".png";
        CHECK(slurp(tmp.file("out1/" + leaf)) == slurp(tmp.file("out2/" + leaf)));
        const std::string lab = std::string(stem) + "_labels.png";
        CHECK(slurp(tmp.file("out1/" + lab)) == slurp(tmp.file("out2/" + lab)));
    }
    const json report = slurp_json(tmp.file("out1/report.json"));
    CHECK(report.at("records").size() == 2);
    CHECK(report.at("records")[0].at("stem") == "pair0");
}

TEST_CASE("eval miou and trimap write reports with defaulted bands") {
    testutil::TempDir tmp("cli_eval");
    bk::Rng rng(17);
    std::filesystem::create_directories(tmp.file("pred"));
    std::filesystem::create_directories(tmp.file("gt"));
    for (int i = 0; i < 2; ++i) {
        const LabelMap gt = testutil::random_labels(rng, 24, 24, 5, 7);
        write_label_png(gt, tmp.file("gt/img" + std::to_string(i) + ".png"));
        write_label_png(gt, tmp.file("pred/img" + std::to_string(i) + ".png"));
    }

    CHECK(run("eval miou --pred " + tmp.file("pred") + " --gt " + tmp.file("gt") +
              " --classes 5 --out " + tmp.file("miou.json")) == 0);
    const json miou_doc = slurp_json(tmp.file("miou.json"));
    CHECK(miou_doc.at("mean_iou") == 1.0);
    CHECK(miou_doc.at("images") == 2);

    CHECK(run("eval trimap --pred " + tmp.file("pred") + " --gt " + tmp.file("gt") +
              " --classes 5 --out " + tmp.file("trimap.json")) == 0);
    const json tri = slurp_json(tmp.file("trimap.json"));
    REQUIRE(tri.at("bands").size() == 4); // default bandwidths
    const int expected[4] = {4, 8, 16, 20};
    for (int i = 0; i < 4; ++i) {
        CHECK(tri.at("bands")[i].at("bandwidth") == expected[i]);
        CHECK(tri.at("bands")[i].at("mean_iou") == 1.0);
    }
    CHECK(tri.at("global").at("mean_iou") == 1.0);
}

TEST_CASE("viz flow renders a zero field white") {
    testutil::TempDir tmp("cli_viz");
    write_tensor(DisplacementField(5, 6), tmp.file("zero.bwtf"));
    CHECK(run("viz flow --disp " + tmp.file("zero.bwtf") + " --out " +
              tmp.file("flow.png")) == 0);
    for (std::uint8_t v : read_rgb_png(tmp.file("flow.png")).data) CHECK(v == 255);

    LabelMap labels(4, 4, 19, 255, 11);
    write_label_png(labels, tmp.file("labels.png"));
    CHECK(run("viz labels --labels " + tmp.file("labels.png") + " --out " +
              tmp.file("rgb.png")) == 0);
    const RgbImage img = read_rgb_png(tmp.file("rgb.png"));
    CHECK(img.data[0] == 220); // person color from the default palette
}

TEST_CASE("error paths use the documented exit codes") {
    testutil::TempDir tmp("cli_errors");

    // missing input file: data error, exit 2, path in the message
    const std::string log = tmp.file("missing.log");
    CHECK(run("edges extract --labels " + tmp.file("nope.png") + " --out " +
              tmp.file("x.png"),
              log) == 2);
    CHECK(slurp(log).find("nope.png") != std::string::npos);

    // invalid parameter value: validation error, exit 1
    LabelMap labels(6, 6, 19, 255, 0);
    write_label_png(labels, tmp.file("l.png"));
    write_rgb_png(RgbImage(6, 6), tmp.file("i.png"));
    CHECK(run("augment paste --target-img " + tmp.file("i.png") + " --target-pseudo " +
              tmp.file("l.png") + " --dest-img " + tmp.file("i.png") + " --dest-labels " +
              tmp.file("l.png") + " --out-img " + tmp.file("o.png") + " --out-labels " +
              tmp.file("ol.png") + " --erode-side 4") == 1);

    // unknown CLI flag: exit 1
    CHECK(run("edges extract --labels " + tmp.file("l.png") + " --out " +
              tmp.file("e.png") + " --frobnicate 3") == 1);

    // unknown subcommand: exit 1
    CHECK(run("transmogrify") == 1);
}

TEST_CASE("relative outputs land under --output-dir") {
    testutil::TempDir tmp("cli_outdir");
    LabelMap labels(6, 6, 2);
    for (int y = 0; y < 6; ++y)
        for (int x = 3; x < 6; ++x) labels.at(y, x) = 1;
    write_label_png(labels, tmp.file("labels.png"));

    CHECK(run("edges extract --labels " + tmp.file("labels.png") +
              " --out sub/edges.png --output-dir " + tmp.file("artifacts")) == 0);
    CHECK(std::filesystem::exists(tmp.file("artifacts/sub/edges.png")));
}

TEST_CASE("config files supply defaults and reject unknown keys") {
    testutil::TempDir tmp("cli_config");
    LabelMap labels(8, 8, 2);
    for (int y = 0; y < 8; ++y)
        for (int x = 4; x < 8; ++x) labels.at(y, x) = 1;
    write_label_png(labels, tmp.file("labels.png"));

    { // empty document: everything defaulted
        std::ofstream out(tmp.file("empty.json"));
        out << "{}\n";
    }
    CHECK(run("--config " + tmp.file("empty.json") + " edges extract --labels " +
              tmp.file("labels.png") + " --out " + tmp.file("e1.png")) == 0);

    { // config-driven canny method
        std::ofstream out(tmp.file("canny.json"));
        out << R"({"edges": {"method": "canny", "sigma": 1.5}})" << "\n";
    }
    CHECK(run("--config " + tmp.file("canny.json") + " edges extract --labels " +
              tmp.file("labels.png") + " --out " + tmp.file("e2.png")) == 0);

    { // unknown key is named in the error
        std::ofstream out(tmp.file("bad.json"));
        out << R"({"edges": {"methood": "canny"}})" << "\n";
    }
    const std::string log = tmp.file("bad.log");
    CHECK(run("--config " + tmp.file("bad.json") + " edges extract --labels " +
              tmp.file("labels.png") + " --out " + tmp.file("e3.png"),
              log) == 1);
    CHECK(slurp(log).find("methood") != std::string::npos);

    { // erode side must be odd even when it comes from the file
        std::ofstream out(tmp.file("even.json"));
        out << R"({"augment": {"erode_side": 4}})" << "\n";
    }
    CHECK(run("--config " + tmp.file("even.json") + " selfcheck") == 1);
}
