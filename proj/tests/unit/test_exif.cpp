#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "medford/exif.hpp"
#include "support.hpp"

using namespace medford;

namespace {

std::string fixture(const std::string& name) { return test::slurp(test::data("fixtures/exif/" + name)); }

std::string error_code(std::string_view bytes) {
    try {
        read_exif(bytes);
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("fixtures agree with the independent reader") {
    // expected.json was written by make_fixtures.py from Pillow's reading of each image
    auto expected = nlohmann::json::parse(fixture("expected.json"));
    for (const char* name : {"gps_ii.jpg", "gps_mm.jpg", "date_only.jpg"}) {
        CAPTURE(name);
        auto rec = read_exif(fixture(name));
        const auto& want = expected.at(name);
        CHECK(rec.datetime_original == want.at("datetime_original").get<std::string>());
        if (want.contains("lat")) {
            REQUIRE(rec.gps);
            CHECK(std::abs(rec.gps->lat - want["lat"].get<double>()) < 1e-6);
            CHECK(std::abs(rec.gps->lon - want["lon"].get<double>()) < 1e-6);
            CHECK(rec.make == want["make"].get<std::string>());
            CHECK(rec.model == want["model"].get<std::string>());
        } else {
            CHECK_FALSE(rec.gps);
            CHECK_FALSE(rec.make);
            CHECK_FALSE(rec.model);
        }
    }
}

TEST_CASE("byte order does not matter") {
    CHECK(read_exif(fixture("gps_ii.jpg")) == read_exif(fixture("gps_mm.jpg")));
}

TEST_CASE("frozen decimal coordinates") {
    auto rec = read_exif(fixture("gps_ii.jpg"));
    REQUIRE(rec.gps);
    CHECK(std::abs(rec.gps->lat - 41.890194) < 1e-6);
    CHECK(std::abs(rec.gps->lon - 12.492250) < 1e-6);
    CHECK(rec.datetime_original == "2021-07-27T10:15:30");
}

TEST_CASE("error codes") {
    CHECK(error_code(fixture("no_exif.jpg")) == "E-EXIF-ABSENT");
    CHECK(error_code("GIF89a") == "E-EXIF-NOT-JPEG");
    CHECK(error_code("") == "E-EXIF-NOT-JPEG");
    CHECK(error_code("\xFF\xD8") == "E-EXIF-ABSENT");
    // APP1 whose IFD offset points past the end
    std::string bad = "\xFF\xD8\xFF\xE1";
    std::string body = std::string("Exif\0\0", 6) + "II" + std::string("\x2A\x00\xFF\x00\x00\x00", 6);
    bad += static_cast<char>(0);
    bad += static_cast<char>(body.size() + 2);
    bad += body;
    CHECK(error_code(bad) == "E-EXIF-CORRUPT");
}

TEST_CASE("truncated and mutated input never reads out of bounds") {
    auto good = fixture("gps_mm.jpg");
    for (std::size_t n = 0; n < good.size(); ++n) {
        auto code = error_code(std::string_view(good).substr(0, n));
        (void)code;  // any outcome is fine as long as it is not a crash
    }
    std::mt19937 rng(4242);
    for (int i = 0; i < 2000; ++i) {
        auto copy = good;
        int flips = std::uniform_int_distribution<int>(1, 4)(rng);
        for (int k = 0; k < flips; ++k)
            copy[std::uniform_int_distribution<std::size_t>(0, 200)(rng)] ^=
                static_cast<char>(1 << std::uniform_int_distribution<int>(0, 7)(rng));
        try {
            auto rec = read_exif(copy);
            if (rec.gps) {
                CHECK(std::abs(rec.gps->lat) <= 90);
                CHECK(std::abs(rec.gps->lon) <= 180);
            }
        } catch (const Error& e) {
            CHECK(e.code().rfind("E-EXIF-", 0) == 0);
        }
    }
}

TEST_CASE("exif_to_block") {
    auto full = exif_to_block(read_exif(fixture("gps_ii.jpg")), "01_pdam.jpg");
    CHECK(full.major == "Photo");
    CHECK(full.name == "01_pdam.jpg");
    REQUIRE(full.minors.size() == 5);
    CHECK(serialize(full) ==
          "@Photo 01_pdam.jpg\n@Photo-Date 2021-07-27T10:15:30\n@Photo-Latitude 41.890194\n"
          "@Photo-Longitude 12.492250\n@Photo-Make Canon\n@Photo-Model Canon EOS 5D\n");

    CHECK(exif_to_block(ExifRecord{}, "empty").minors.empty());
    auto date_only = exif_to_block(read_exif(fixture("date_only.jpg")), "d");
    REQUIRE(date_only.minors.size() == 1);
    CHECK(date_only.minors[0].minor == "Date");

    ExifRecord south{std::nullopt, GpsPosition{-33.5, -70.25}, std::nullopt, std::nullopt};
    CHECK(serialize(exif_to_block(south, "s")) == "@Photo s\n@Photo-Latitude -33.500000\n@Photo-Longitude -70.250000\n");
}

TEST_CASE("emitted blocks pass the bundled Photo schema") {
    for (const char* name : {"gps_ii.jpg", "gps_mm.jpg", "date_only.jpg"}) {
        auto text = serialize(exif_to_block(read_exif(fixture(name)), name));
        auto a = analyze("/virtual/photo.mfd", text, base_mode(), test::memory_loader({}));
        CHECK_FALSE(has_errors(a.diagnostics));
        CHECK(a.diagnostics.empty());
    }
}
