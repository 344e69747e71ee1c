#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dcart/config.hpp"
#include "dcart/io.hpp"

using namespace dcart;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("dcart_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST(ImageIo, BitExactRoundTrip) {
    TempDir tmp;
    Image img(ImageGrid{3, 0.25, {12.75, -3.124567890123456789}});
    double x = 0.1;
    for (auto& v : img.values) {
        v = x;
        x = x * 3.9 * (1.0 - x);  // fill with irrational-ish doubles
    }
    img.values[4] = -0.0;
    write_image(img, tmp.file("a.dcim"));
    const Image back = read_image(tmp.file("a.dcim"));
    EXPECT_EQ(back.grid.n, img.grid.n);
    EXPECT_EQ(back.grid.pixel_size, img.grid.pixel_size);
    EXPECT_EQ(back.grid.center.x, img.grid.center.x);
    EXPECT_EQ(back.grid.center.y, img.grid.center.y);
    ASSERT_EQ(back.values.size(), img.values.size());
    for (std::size_t i = 0; i < img.values.size(); ++i)
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back.values[i]),
                  std::bit_cast<std::uint64_t>(img.values[i]));
}

TEST(ImageIo, PayloadSizeIsExactly8BytesPerPixel) {
    TempDir tmp;
    Image img(ImageGrid{2, 1.0, {0.0, 0.0}});
    img.values = {0.0, 1.0, 2.0, 3.0};
    const std::string path = tmp.file("b.dcim");
    write_image(img, path);
    std::ifstream is(path, std::ios::binary);
    std::string header;
    int newlines = 0;
    char c;
    std::size_t header_len = 0;
    while (is.get(c)) {
        ++header_len;
        if (c == '\n' && ++newlines == 6)
            break;
    }
    EXPECT_EQ(std::filesystem::file_size(path), header_len + 4 * 8);
}

TEST(SinogramIo, RoundTripAndErrors) {
    TempDir tmp;
    SystemGeometry g{.R = 64.0, .rho_max = 320.0, .n_rho = 4, .n_phi = 6, .arc_step = 0.5};
    Sinogram s(g);
    for (std::size_t i = 0; i < s.values.size(); ++i)
        s.values[i] = std::sin(static_cast<double>(i)) * 1e3;
    const std::string path = tmp.file("s.dcsg");
    write_sinogram(s, path);
    const Sinogram back = read_sinogram(path);
    EXPECT_EQ(back.geometry.R, g.R);
    EXPECT_EQ(back.geometry.rho_max, g.rho_max);
    EXPECT_EQ(back.geometry.n_rho, g.n_rho);
    EXPECT_EQ(back.geometry.n_phi, g.n_phi);
    EXPECT_EQ(back.geometry.arc_step, g.arc_step);
    EXPECT_EQ(back.values, s.values);

    // bad magic
    {
        std::ofstream os(tmp.file("bad1"), std::ios::binary);
        os << "NOPE1\nR=64\n";
    }
    EXPECT_THROW(read_sinogram(tmp.file("bad1")), bad_magic_error);

    // truncated payload
    {
        std::ifstream is(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        std::ofstream os(tmp.file("bad2"), std::ios::binary);
        os.write(all.data(), static_cast<std::streamsize>(all.size() - 9));
    }
    EXPECT_THROW(read_sinogram(tmp.file("bad2")), truncated_error);

    // header/payload mismatch (extra bytes)
    {
        std::ifstream is(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        all += std::string(8, '\0');
        std::ofstream os(tmp.file("bad3"), std::ios::binary);
        os.write(all.data(), static_cast<std::streamsize>(all.size()));
    }
    EXPECT_THROW(read_sinogram(tmp.file("bad3")), header_mismatch_error);

    // wrong header key order
    {
        std::ofstream os(tmp.file("bad4"), std::ios::binary);
        os << "DCSG1\nrho_max=320\nR=64\n";
    }
    EXPECT_THROW(read_sinogram(tmp.file("bad4")), header_mismatch_error);
}

TEST(Pgm16, HeaderAndSize) {
    TempDir tmp;
    Image img(ImageGrid{4, 1.0, {0.0, 0.0}});
    for (std::size_t i = 0; i < img.values.size(); ++i)
        img.values[i] = static_cast<double>(i);
    const std::string path = tmp.file("v.pgm");
    write_pgm16(img, path);
    std::ifstream is(path, std::ios::binary);
    std::string magic, dims, maxval;
    std::getline(is, magic);
    std::getline(is, dims);
    std::getline(is, maxval);
    EXPECT_EQ(magic, "P5");
    EXPECT_EQ(dims, "4 4");
    EXPECT_EQ(maxval, "65535");
    // payload: 16 big-endian uint16; max value maps to 65535, min to 0
    std::vector<unsigned char> buf(32);
    is.read(reinterpret_cast<char*>(buf.data()), 32);
    EXPECT_EQ(is.gcount(), 32);
    // first sample is the top-left pixel = (u=0, v=N-1) = value 12 -> 12/15
    const unsigned first = (buf[0] << 8) | buf[1];
    EXPECT_EQ(first, static_cast<unsigned>(std::lround(65535.0 * 12.0 / 15.0)));
}

TEST(MetricsText, KeyValueSchema) {
    MetricsReport rep;
    rep.nmse = 0.25;
    rep.nmae = 0.125;
    rep.geometry = {.R = 64.0, .rho_max = 1250.0, .n_rho = 408, .n_phi = 402};
    rep.grid_n = 128;
    rep.q = 10.0;
    rep.snr_db = 15.0;
    const std::string text = metrics_to_text(rep);
    EXPECT_NE(text.find("nmse=0.25"), std::string::npos);
    EXPECT_NE(text.find("nmae=0.125"), std::string::npos);
    EXPECT_NE(text.find("n_rho=408"), std::string::npos);
    EXPECT_NE(text.find("snr_db=15"), std::string::npos);
    EXPECT_EQ(text.find("seed="), std::string::npos);
}

TEST(Config, RoundTripAndResolution) {
    RunConfig c;
    c.R = 64.0;
    c.rho_max = 1250.0;
    c.q = 10.0;
    c.arc_step = 1.0;
    c.epsilon = 1.0;
    c.grid_n = 128;
    c.pixel_size = 1.0;
    c.phantom = "shepp-logan";
    c.snr_db = 15.0;
    c.seed = 42;
    c.output_dir = "out";
    c.validate();

    const RunConfig back = config_from_json(config_to_json(c));
    EXPECT_TRUE(back == c);

    // resolution: N_phi = round(2 pi R) = 402; N_rho = round(Q N^2 / N_phi)
    const SystemGeometry g = c.resolved_geometry();
    EXPECT_EQ(g.n_phi, 402);
    EXPECT_EQ(g.n_rho, 408);
    const ImageGrid grid = c.resolved_grid();
    EXPECT_NEAR(grid.center.x, 64.0 + 128.0 * std::numbers::sqrt2 / 2.0 + 8.0, 1e-12);
    EXPECT_DOUBLE_EQ(grid.center.y, 0.0);

    // paper's worked example: Q=1, N=512, N_phi=1609 -> N_rho = 163
    RunConfig p = c;
    p.R = 256.0;
    p.rho_max = 5000.0;
    p.q = 1.0;
    p.grid_n = 512;
    p.n_phi = 1609;
    EXPECT_EQ(p.resolved_geometry().n_rho, 163);
}

TEST(Config, ValidationNamesOffendingKey) {
    const auto expect_key = [](const char* json_text, const std::string& key) {
        try {
            config_from_json(nlohmann::json::parse(json_text));
            FAIL() << "expected config_error for " << key;
        } catch (const config_error& e) {
            EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
        }
    };
    expect_key(R"({"geometry":{"R":-1,"rho_max":100,"q":1},"grid":{"n":16},"phantom":"bars"})",
               "geometry.R");
    expect_key(R"({"geometry":{"R":10,"rho_max":5,"q":1},"grid":{"n":16},"phantom":"bars"})",
               "geometry.rho_max");
    expect_key(R"({"geometry":{"R":10,"rho_max":50},"grid":{"n":16},"phantom":"bars"})",
               "geometry.q");
    expect_key(
        R"({"geometry":{"R":10,"rho_max":50,"q":1,"n_rho":4},"grid":{"n":16},"phantom":"bars"})",
        "geometry.q");
    expect_key(R"({"geometry":{"R":10,"rho_max":50,"q":1},"grid":{"n":1},"phantom":"bars"})",
               "grid.n");
    expect_key(R"({"geometry":{"R":10,"rho_max":50,"q":1},"grid":{"n":16},"phantom":"wat"})",
               "phantom");
}
