#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "medford/document.hpp"

namespace medford {

struct GpsPosition {
    double lat = 0;  // signed decimal degrees, north positive
    double lon = 0;  // east positive

    friend bool operator==(const GpsPosition&, const GpsPosition&) = default;
};

struct ExifRecord {
    std::optional<std::string> datetime_original;  // YYYY-MM-DDTHH:MM:SS
    std::optional<GpsPosition> gps;
    std::optional<std::string> make;
    std::optional<std::string> model;

    friend bool operator==(const ExifRecord&, const ExifRecord&) = default;
};

/// Reads Make, Model, DateTimeOriginal and GPS latitude/longitude from the
/// APP1 Exif segment of a JPEG. Throws Error with E-EXIF-NOT-JPEG,
/// E-EXIF-ABSENT or E-EXIF-CORRUPT.
ExifRecord read_exif(std::string_view bytes);

/// `@Photo <name>` with Date, Latitude, Longitude, Make and Model minors for
/// the fields that are present.
Block exif_to_block(const ExifRecord& rec, const std::string& name);

}  // namespace medford
