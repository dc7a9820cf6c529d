#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "glr/io.hpp"
#include "support/synthetic.hpp"

using namespace glr;
using namespace glr::testing;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("glr_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("ascii ply with a single vertex") {
    TempDir dir;
    std::string path = dir.file("one.ply");
    write_text(path,
               "ply\nformat ascii 1.0\nelement vertex 1\n"
               "property float x\nproperty float y\nproperty float z\nend_header\n"
               "0 0 0\n");
    PointCloud cloud = read_cloud(path);
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.points[0] == Vec3(0, 0, 0));
}

TEST_CASE("xyz text parses rows of three") {
    TempDir dir;
    std::string path = dir.file("two.xyz");
    write_text(path, "1 2 3\n4 5 6\n");
    PointCloud cloud = read_cloud(path);
    REQUIRE(cloud.size() == 2);
    CHECK(cloud.points[0] == Vec3(1, 2, 3));
    CHECK(cloud.points[1] == Vec3(4, 5, 6));
}

TEST_CASE("binary round trip is bit exact") {
    TempDir dir;
    PointCloud cloud = random_box_cloud(137, 9090);
    std::string path = dir.file("cloud.ply");
    write_cloud(cloud, {CloudFormat::PlyBinaryLE, path});
    PointCloud back = read_cloud(path);
    REQUIRE(back.size() == cloud.size());
    for (int i = 0; i < cloud.size(); ++i)
        CHECK(back.points[static_cast<std::size_t>(i)] == cloud.points[static_cast<std::size_t>(i)]);
}

TEST_CASE("text round trips hold nine significant digits") {
    TempDir dir;
    PointCloud cloud = random_box_cloud(64, 777);
    for (auto format : {CloudFormat::PlyAscii, CloudFormat::Xyz}) {
        std::string path = dir.file(format == CloudFormat::Xyz ? "t.xyz" : "t.ply");
        write_cloud(cloud, {format, path});
        PointCloud back = read_cloud(path);
        REQUIRE(back.size() == cloud.size());
        for (int i = 0; i < cloud.size(); ++i)
            for (int axis = 0; axis < 3; ++axis) {
                double a = cloud.points[static_cast<std::size_t>(i)][axis];
                double b = back.points[static_cast<std::size_t>(i)][axis];
                CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
            }
        // a second pass through text must reproduce the bytes
        std::string again = dir.file("again");
        write_cloud(back, {format, again});
        std::ifstream f1(path, std::ios::binary), f2(again, std::ios::binary);
        std::string s1((std::istreambuf_iterator<char>(f1)), {});
        std::string s2((std::istreambuf_iterator<char>(f2)), {});
        CHECK(s1 == s2);
    }
}

TEST_CASE("float-typed binary ply reads correctly") {
    TempDir dir;
    std::string path = dir.file("float.ply");
    std::ofstream out(path, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 2\n"
        << "property float x\nproperty float y\nproperty float z\nend_header\n";
    float data[6] = {1.5f, -2.0f, 0.25f, 3.0f, 4.0f, 5.0f};
    out.write(reinterpret_cast<const char*>(data), sizeof(data));
    out.close();
    PointCloud cloud = read_cloud(path);
    REQUIRE(cloud.size() == 2);
    CHECK(cloud.points[0] == Vec3(1.5, -2.0, 0.25));
    CHECK(cloud.points[1] == Vec3(3.0, 4.0, 5.0));
}

TEST_CASE("binary ply with mixed property types and shuffled order") {
    TempDir dir;
    std::string path = dir.file("mixed.ply");
    std::ofstream out(path, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 2\n"
        << "property uchar flags\nproperty double z\nproperty float x\n"
        << "property int label\nproperty double y\nend_header\n";
    auto put = [&](const void* p, std::size_t n) {
        out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
    };
    for (int i = 0; i < 2; ++i) {
        unsigned char flags = 7;
        double z = 30.0 + i;
        float x = 10.0f + static_cast<float>(i);
        int label = -4;
        double y = 20.0 + i;
        put(&flags, 1);
        put(&z, 8);
        put(&x, 4);
        put(&label, 4);
        put(&y, 8);
    }
    out.close();
    PointCloud cloud = read_cloud(path);
    REQUIRE(cloud.size() == 2);
    CHECK(cloud.points[0] == Vec3(10, 20, 30));
    CHECK(cloud.points[1] == Vec3(11, 21, 31));
}

TEST_CASE("xyz rows may carry extra columns") {
    TempDir dir;
    std::string path = dir.file("normals.xyz");
    write_text(path, "1 2 3 0 0 1\n4 5 6 0 1 0\n");
    PointCloud cloud = read_cloud(path);
    REQUIRE(cloud.size() == 2);
    CHECK(cloud.points[0] == Vec3(1, 2, 3));
    CHECK(cloud.points[1] == Vec3(4, 5, 6));
}

TEST_CASE("extra vertex properties are skipped") {
    TempDir dir;
    std::string path = dir.file("extra.ply");
    write_text(path,
               "ply\nformat ascii 1.0\ncomment scanned\nelement vertex 2\n"
               "property float x\nproperty float y\nproperty float z\n"
               "property uchar intensity\nend_header\n"
               "1 2 3 200\n4 5 6 100\n");
    PointCloud cloud = read_cloud(path);
    REQUIRE(cloud.size() == 2);
    CHECK(cloud.points[1] == Vec3(4, 5, 6));
}

TEST_CASE("missing coordinate property is an unsupported layout") {
    TempDir dir;
    std::string path = dir.file("no_z.ply");
    write_text(path,
               "ply\nformat ascii 1.0\nelement vertex 1\n"
               "property float x\nproperty float y\nend_header\n"
               "0 0\n");
    CHECK_THROWS_WITH_AS(read_cloud(path), doctest::Contains("unsupported layout"),
                         std::runtime_error);
}

TEST_CASE("malformed vertex count is a corrupt header") {
    TempDir dir;
    std::string path = dir.file("bad_count.ply");
    write_text(path,
               "ply\nformat ascii 1.0\nelement vertex banana\n"
               "property float x\nproperty float y\nproperty float z\nend_header\n");
    CHECK_THROWS_WITH_AS(read_cloud(path), doctest::Contains("corrupt header"),
                         std::runtime_error);
}

TEST_CASE("missing end_header is a corrupt header") {
    TempDir dir;
    std::string path = dir.file("no_end.ply");
    write_text(path,
               "ply\nformat ascii 1.0\nelement vertex 1\n"
               "property float x\nproperty float y\nproperty float z\n");
    CHECK_THROWS_WITH_AS(read_cloud(path), doctest::Contains("corrupt header"),
                         std::runtime_error);
}

TEST_CASE("non-finite coordinates are rejected with their record") {
    TempDir dir;
    std::string path = dir.file("nan.ply");
    write_text(path,
               "ply\nformat ascii 1.0\nelement vertex 2\n"
               "property float x\nproperty float y\nproperty float z\nend_header\n"
               "0 0 0\n1 nan 2\n");
    CHECK_THROWS_WITH_AS(read_cloud(path), doctest::Contains("invalid coordinate at record 1"),
                         std::runtime_error);

    std::string xyz = dir.file("nan.xyz");
    write_text(xyz, "0 0 0\n1 inf 2\n");
    CHECK_THROWS_WITH_AS(read_cloud(xyz), doctest::Contains("invalid coordinate at line 2"),
                         std::runtime_error);
}

TEST_CASE("list properties and big-endian files are unsupported") {
    TempDir dir;
    std::string path = dir.file("list.ply");
    write_text(path,
               "ply\nformat ascii 1.0\nelement vertex 1\n"
               "property list uchar int vertex_indices\nend_header\n");
    CHECK_THROWS_WITH_AS(read_cloud(path), doctest::Contains("unsupported layout"),
                         std::runtime_error);

    std::string be = dir.file("big.ply");
    write_text(be,
               "ply\nformat binary_big_endian 1.0\nelement vertex 1\n"
               "property float x\nproperty float y\nproperty float z\nend_header\n");
    CHECK_THROWS_WITH_AS(read_cloud(be), doctest::Contains("unsupported layout"),
                         std::runtime_error);
}

TEST_CASE("truncated binary data reports the failure") {
    TempDir dir;
    std::string path = dir.file("short.ply");
    std::ofstream out(path, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 3\n"
        << "property double x\nproperty double y\nproperty double z\nend_header\n";
    double data[3] = {1, 2, 3}; // one vertex instead of three
    out.write(reinterpret_cast<const char*>(data), sizeof(data));
    out.close();
    CHECK_THROWS_WITH_AS(read_cloud(path), doctest::Contains("truncated"),
                         std::runtime_error);
}

TEST_CASE("empty xyz input is rejected") {
    TempDir dir;
    std::string path = dir.file("empty.xyz");
    write_text(path, "\n# comment only\n");
    CHECK_THROWS_WITH_AS(read_cloud(path), doctest::Contains("empty input"),
                         std::runtime_error);
}

TEST_CASE("missing file carries the path in the error") {
    CHECK_THROWS_WITH_AS(read_cloud("/nonexistent/cloud.ply"),
                         doctest::Contains("cannot open file"), std::runtime_error);
}

TEST_SUITE_END();
