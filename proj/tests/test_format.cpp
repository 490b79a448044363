#include <doctest.h>

#include <filesystem>

#include "lowlying/format.hpp"

using namespace lowlying;

TEST_CASE("fmt12 renders twelve significant digits without locale effects") {
    CHECK(fmt12(0.0) == "0");
    CHECK(fmt12(1.0) == "1");
    CHECK(fmt12(-2.5) == "-2.5");
    CHECK(fmt12(1.0 / 3.0) == "0.333333333333");
    CHECK(fmt12(1234567890123.0) == "1.23456789012e+12");
    CHECK(fmt12(0.000125) == "0.000125");
    CHECK(fmt12(1e-30) == "1e-30");
}

TEST_CASE("split_csv_line keeps empty fields and has no quoting rules") {
    CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
    CHECK(split_csv_line("") == std::vector<std::string>{""});
    CHECK(split_csv_line("x,") == std::vector<std::string>{"x", ""});
}

TEST_CASE("fnv1a64 matches the published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("atomic_write_file round-trips and leaves no temporary behind") {
    auto dir = std::filesystem::temp_directory_path() / "lowlying_fmt_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    auto path = dir / "out.txt";

    atomic_write_file(path, "first\n");
    CHECK(read_file(path) == "first\n");
    atomic_write_file(path, "second\n");
    CHECK(read_file(path) == "second\n");
    CHECK(!std::filesystem::exists(path.string() + ".tmp"));

    CHECK(fnv1a64_file(path) == fnv1a64("second\n"));
    std::filesystem::remove_all(dir);
}
