#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <vector>

#include "boundarykit/errors.hpp"
#include "boundarykit/grid.hpp"
#include "boundarykit/png_io.hpp"
#include "boundarykit/tensor_io.hpp"
#include "boundarykit/upsample.hpp"
#include "testutil.hpp"

using namespace bk;

TEST_CASE("grid types enforce their invariants") {
    CHECK_THROWS_AS(LabelMap(0, 4, 3), ValidationError);
    CHECK_THROWS_AS(FeatureMap(0, 2, 2), ValidationError);

    LabelMap m(2, 2, 3);
    m.at(0, 0) = 7; // neither class nor ignore
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m.at(0, 0) = 255;
    CHECK_NOTHROW(m.validate());

    FeatureMap f(1, 2, 2);
    f.data[1] = std::nanf("");
    CHECK_THROWS_AS(f.validate(), ValidationError);
}

TEST_CASE("bilinear upsample preserves constants exactly") {
    FeatureMap src(1, 1, 1, 0.73125f);
    const FeatureMap up = bilinear_upsample(src, 4, 4);
    CHECK(up.height == 4);
    CHECK(up.width == 4);
    for (float v : up.data) CHECK(v == 0.73125f);

    bk::Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        const float v = float(rng.next_in(-5.0, 5.0));
        FeatureMap c(2, 1 + int(rng.next_below(4)), 1 + int(rng.next_below(4)), v);
        const FeatureMap u = bilinear_upsample(c, c.height + int(rng.next_below(9)),
                                               c.width + int(rng.next_below(9)));
        for (float got : u.data) CHECK(got == v);
    }
}

TEST_CASE("bilinear upsample matches the hand-evaluated row case") {
    // 2x2 rows [0,1] widened to 4 columns
    FeatureMap src(1, 2, 2);
    src.at(0, 0, 1) = 1.0f;
    src.at(0, 1, 1) = 1.0f;
    const FeatureMap up = bilinear_upsample(src, 2, 4);
    const float expected[4] = {0.0f, 0.25f, 0.75f, 1.0f};
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 4; ++x) CHECK(up.at(0, y, x) == expected[x]);
}

TEST_CASE("bilinear upsample to the same size is the identity") {
    bk::Rng rng(11);
    const FeatureMap src = testutil::random_features(rng, 3, 5, 7);
    const FeatureMap up = bilinear_upsample(src, 5, 7);
    CHECK(up.data == src.data);
}

TEST_CASE("bilinear upsample is linear within 1e-6") {
    bk::Rng rng(19);
    for (int i = 0; i < 5; ++i) {
        const int h = 2 + int(rng.next_below(5)), w = 2 + int(rng.next_below(5));
        const int oh = h + int(rng.next_below(8)), ow = w + int(rng.next_below(8));
        const FeatureMap a = testutil::random_features(rng, 2, h, w);
        const FeatureMap b = testutil::random_features(rng, 2, h, w);
        const double alpha = rng.next_in(-2.0, 2.0), beta = rng.next_in(-2.0, 2.0);

        FeatureMap mix(2, h, w);
        for (std::size_t k = 0; k < mix.data.size(); ++k)
            mix.data[k] = float(alpha * a.data[k] + beta * b.data[k]);

        const FeatureMap up_mix = bilinear_upsample(mix, oh, ow);
        const FeatureMap up_a = bilinear_upsample(a, oh, ow);
        const FeatureMap up_b = bilinear_upsample(b, oh, ow);
        for (std::size_t k = 0; k < up_mix.data.size(); ++k) {
            const double want = alpha * up_a.data[k] + beta * up_b.data[k];
            CHECK(std::abs(up_mix.data[k] - want) < 1e-6);
        }
    }
}

TEST_CASE("upsampled values stay inside the per-channel source range") {
    bk::Rng rng(23);
    for (int i = 0; i < 5; ++i) {
        const FeatureMap src = testutil::random_features(rng, 3, 4, 4, -7.0, 7.0);
        const FeatureMap up = bilinear_upsample(src, 9, 13);
        for (int c = 0; c < 3; ++c) {
            float lo = src.at(c, 0, 0), hi = lo;
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 4; ++x) {
                    lo = std::min(lo, src.at(c, y, x));
                    hi = std::max(hi, src.at(c, y, x));
                }
            for (int y = 0; y < 9; ++y)
                for (int x = 0; x < 13; ++x) {
                    CHECK(up.at(c, y, x) >= lo);
                    CHECK(up.at(c, y, x) <= hi);
                }
        }
    }
}

TEST_CASE("bilinear upsample rejects bad sizes") {
    FeatureMap src(1, 3, 3, 1.0f);
    CHECK_THROWS_AS(bilinear_upsample(src, 0, 4), ValidationError);
    CHECK_THROWS_AS(bilinear_upsample(src, 4, 0), ValidationError);
    CHECK_THROWS_AS(bilinear_upsample(src, 2, 4), ValidationError); // shrink
}

TEST_CASE("tensor files round-trip bit-exactly") {
    testutil::TempDir tmp("tensor_io");
    bk::Rng rng(41);
    FeatureMap m(3, 4, 5);
    for (std::size_t i = 0; i < m.data.size(); ++i)
        m.data[i] = float(rng.next_in(-100.0, 100.0));

    const std::string path = tmp.file("m.bwtf");
    write_tensor(m, path);
    const FeatureMap back = read_feature_map(path);
    CHECK(back.channels == 3);
    CHECK(back.height == 4);
    CHECK(back.width == 5);
    CHECK(back.data == m.data);
}

TEST_CASE("displacement fields map to channels 0 and 1") {
    testutil::TempDir tmp("tensor_disp");
    bk::Rng rng(43);
    const DisplacementField d = testutil::random_disp(rng, 3, 4, -2.0, 2.0);
    const std::string path = tmp.file("d.bwtf");
    write_tensor(d, path);

    const DisplacementField back = read_displacement_field(path);
    CHECK(back.dx == d.dx);
    CHECK(back.dy == d.dy);

    const FeatureMap as_map = read_feature_map(path);
    REQUIRE(as_map.channels == 2);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) {
            CHECK(as_map.at(0, y, x) == d.dx[d.index(y, x)]);
            CHECK(as_map.at(1, y, x) == d.dy[d.index(y, x)]);
        }
}

TEST_CASE("tensor files use the documented byte layout") {
    testutil::TempDir tmp("tensor_layout");
    FeatureMap m(2, 1, 3, 0.0f);
    m.at(0, 0, 0) = 1.0f;
    const std::string path = tmp.file("layout.bwtf");
    write_tensor(m, path);

    std::ifstream in(path, std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    REQUIRE(bytes.size() == 4 + 4 + 1 + 12 + 6 * 4);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "BWTF");
    // version 1, little-endian u32
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == 0);
    CHECK(bytes[7] == 0);
    CHECK(bytes[8] == 3); // rank
    const unsigned dims[3] = {2, 1, 3};
    for (int i = 0; i < 3; ++i) {
        CHECK(bytes[9 + 4 * i] == dims[i]);
        CHECK(bytes[10 + 4 * i] == 0);
    }
    // first payload float is 1.0f = 0x3f800000, little-endian
    CHECK(bytes[21] == 0x00);
    CHECK(bytes[22] == 0x00);
    CHECK(bytes[23] == 0x80);
    CHECK(bytes[24] == 0x3f);
}

TEST_CASE("tensor reader rejects malformed files with byte offsets") {
    testutil::TempDir tmp("tensor_bad");

    const std::string bad_magic = tmp.file("bad_magic.bwtf");
    {
        std::ofstream out(bad_magic, std::ios::binary);
        out.write("XXXX", 4);
    }
    CHECK_THROWS_WITH_AS(read_feature_map(bad_magic),
                         doctest::Contains("bad magic"), DataError);

    FeatureMap m(1, 2, 2, 1.0f);
    const std::string good = tmp.file("good.bwtf");
    write_tensor(m, good);

    // truncate the payload
    const std::string truncated = tmp.file("truncated.bwtf");
    {
        std::ifstream in(good, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        std::ofstream out(truncated, std::ios::binary);
        out.write(bytes.data(), std::streamsize(bytes.size() - 6));
    }
    CHECK_THROWS_WITH_AS(read_feature_map(truncated),
                         doctest::Contains("truncated"), DataError);

    // rank != 3
    const std::string bad_rank = tmp.file("bad_rank.bwtf");
    {
        std::ifstream in(good, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        bytes[8] = 2;
        std::ofstream out(bad_rank, std::ios::binary);
        out.write(bytes.data(), std::streamsize(bytes.size()));
    }
    CHECK_THROWS_WITH_AS(read_feature_map(bad_rank),
                         doctest::Contains("rank"), DataError);

    // a 3-channel tensor is not a displacement field
    FeatureMap three(3, 2, 2, 0.0f);
    const std::string path3 = tmp.file("three.bwtf");
    write_tensor(three, path3);
    CHECK_THROWS_AS(read_displacement_field(path3), DataError);
}

TEST_CASE("label PNGs hold indices and round-trip") {
    testutil::TempDir tmp("label_png");
    LabelMap m(2, 2, 3);
    m.at(0, 0) = 0;
    m.at(0, 1) = 1;
    m.at(1, 0) = 2;
    m.at(1, 1) = 255;

    const std::string path = tmp.file("labels.png");
    write_label_png(m, path);
    const LabelMap back = read_label_png(path, 3);
    CHECK(back.data == m.data);
    CHECK(back.height == 2);
    CHECK(back.width == 2);

    bk::Rng rng(51);
    const LabelMap big = testutil::random_labels(rng, 17, 23, 19, 12);
    const std::string path2 = tmp.file("big.png");
    write_label_png(big, path2);
    CHECK(read_label_png(path2, 19).data == big.data);
}

namespace {

// Paletted PNG whose palette colors deliberately disagree with the indices,
// so a reader expanding the palette would be caught.
void write_paletted_png(const std::string& path, const std::vector<std::uint8_t>& indices,
                        int w, int h, int bit_depth) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    REQUIRE(fp != nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                              nullptr);
    png_infop info = png_create_info_struct(png);
    REQUIRE(setjmp(png_jmpbuf(png)) == 0);
    png_init_io(png, fp);
    png_set_IHDR(png, info, png_uint_32(w), png_uint_32(h), bit_depth,
                 PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_color palette[16];
    for (int i = 0; i < 16; ++i)
        palette[i] = {std::uint8_t(200 - i), std::uint8_t(100 + i), std::uint8_t(3 * i)};
    png_set_PLTE(png, info, palette, 16);
    png_write_info(png, info);
    if (bit_depth < 8) png_set_packing(png); // accept one index per byte
    for (int y = 0; y < h; ++y)
        png_write_row(png, const_cast<png_bytep>(indices.data() + std::size_t(y) * w));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

// Hand-rolled 16-bit grayscale PNG for the negative test.
void write_gray16_png(const std::string& path, int w, int h) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    REQUIRE(fp != nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                              nullptr);
    png_infop info = png_create_info_struct(png);
    REQUIRE(setjmp(png_jmpbuf(png)) == 0);
    png_init_io(png, fp);
    png_set_IHDR(png, info, png_uint_32(w), png_uint_32(h), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<std::uint8_t> row(std::size_t(w) * 2, 0x42);
    for (int y = 0; y < h; ++y) png_write_row(png, row.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

} // namespace

TEST_CASE("paletted PNGs yield palette indices, not colors") {
    testutil::TempDir tmp("label_png_palette");
    bk::Rng rng(53);
    std::vector<std::uint8_t> indices(6 * 5);
    for (auto& v : indices) v = std::uint8_t(rng.next_below(16));

    for (int depth : {8, 4}) {
        const std::string path = tmp.file("pal" + std::to_string(depth) + ".png");
        write_paletted_png(path, indices, 5, 6, depth);
        const LabelMap m = read_label_png(path, 16);
        CHECK(m.height == 6);
        CHECK(m.width == 5);
        CHECK(m.data == indices);
    }
}

TEST_CASE("label PNG reader rejects non-index formats") {
    testutil::TempDir tmp("label_png_bad");

    RgbImage rgb(2, 2, 10, 20, 30);
    const std::string rgb_path = tmp.file("rgb.png");
    write_rgb_png(rgb, rgb_path);
    CHECK_THROWS_WITH_AS(read_label_png(rgb_path), doctest::Contains("index"), DataError);

    const std::string deep_path = tmp.file("deep.png");
    write_gray16_png(deep_path, 3, 2);
    CHECK_THROWS_WITH_AS(read_label_png(deep_path), doctest::Contains("16-bit"), DataError);

    CHECK_THROWS_AS(read_label_png(tmp.file("missing.png")), DataError);
}

TEST_CASE("rgb PNGs round-trip") {
    testutil::TempDir tmp("rgb_png");
    bk::Rng rng(61);
    const RgbImage img = testutil::random_image(rng, 9, 14);
    const std::string path = tmp.file("img.png");
    write_rgb_png(img, path);
    const RgbImage back = read_rgb_png(path);
    CHECK(back.data == img.data);
}

TEST_CASE("mask PNGs store 0/255") {
    testutil::TempDir tmp("mask_png");
    bk::Rng rng(71);
    const BinaryMask mask = testutil::random_mask(rng, 8, 9);
    const std::string path = tmp.file("mask.png");
    write_mask_png(mask, path);
    CHECK(read_mask_png(path).bits == mask.bits);

    const LabelMap raw = read_label_png(path, 256);
    for (std::size_t i = 0; i < raw.data.size(); ++i)
        CHECK(raw.data[i] == (mask.bits[i] ? 255 : 0));
}
