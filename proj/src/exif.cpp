#include "medford/exif.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>

namespace medford {

namespace {

constexpr std::uint16_t kMake = 0x010F;
constexpr std::uint16_t kModel = 0x0110;
constexpr std::uint16_t kExifIfd = 0x8769;
constexpr std::uint16_t kGpsIfd = 0x8825;
constexpr std::uint16_t kDateTimeOriginal = 0x9003;
constexpr std::uint16_t kGpsLatRef = 1;
constexpr std::uint16_t kGpsLat = 2;
constexpr std::uint16_t kGpsLonRef = 3;
constexpr std::uint16_t kGpsLon = 4;

[[noreturn]] void corrupt(const std::string& what) { throw Error("E-EXIF-CORRUPT", "corrupt EXIF data: " + what); }

std::uint32_t type_size(std::uint16_t type) {
    switch (type) {
        case 1: case 2: case 6: case 7: return 1;
        case 3: case 8: return 2;
        case 4: case 9: case 11: return 4;
        case 5: case 10: case 12: return 8;
        default: return 0;
    }
}

struct IfdEntry {
    std::uint16_t tag;
    std::uint16_t type;
    std::uint32_t count;
    std::size_t value_offset;  // into the TIFF buffer
};

class Tiff {
public:
    explicit Tiff(std::string_view data) : data_(data) {
        if (data_.size() < 8) corrupt("TIFF header truncated");
        if (data_.substr(0, 2) == "II") little_ = true;
        else if (data_.substr(0, 2) == "MM") little_ = false;
        else corrupt("unknown byte order");
        if (u16(2) != 42) corrupt("bad TIFF magic");
    }

    std::uint16_t u16(std::size_t at) const {
        check(at, 2);
        auto b0 = byte(at), b1 = byte(at + 1);
        return static_cast<std::uint16_t>(little_ ? (b0 | b1 << 8) : (b0 << 8 | b1));
    }
    std::uint32_t u32(std::size_t at) const {
        check(at, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            std::uint32_t b = byte(at + (little_ ? 3 - i : i));
            v = v << 8 | b;
        }
        return v;
    }

    std::vector<IfdEntry> ifd(std::size_t offset) const {
        auto count = u16(offset);
        check(offset + 2, static_cast<std::size_t>(count) * 12);
        std::vector<IfdEntry> out;
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t at = offset + 2 + i * 12;
            IfdEntry e{u16(at), u16(at + 2), u32(at + 4), at + 8};
            auto size = static_cast<std::uint64_t>(type_size(e.type)) * e.count;
            if (size > 4) e.value_offset = u32(at + 8);
            if (type_size(e.type) != 0) check(e.value_offset, size);
            out.push_back(e);
        }
        return out;
    }

    std::string ascii(const IfdEntry& e) const {
        if (e.type != 2 && e.type != 7) corrupt("expected ASCII value");
        auto s = std::string(data_.substr(e.value_offset, e.count));
        while (!s.empty() && (s.back() == '\0' || s.back() == ' ')) s.pop_back();
        if (auto nul = s.find('\0'); nul != std::string::npos) s.resize(nul);
        return s;
    }

    std::optional<double> rational(const IfdEntry& e, std::size_t index) const {
        if (e.type != 5 || index >= e.count) return std::nullopt;
        auto num = u32(e.value_offset + index * 8);
        auto den = u32(e.value_offset + index * 8 + 4);
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / den;
    }

private:
    std::uint32_t byte(std::size_t at) const { return static_cast<unsigned char>(data_[at]); }
    void check(std::size_t at, std::uint64_t n) const {
        if (at > data_.size() || data_.size() - at < n) corrupt("offset out of bounds");
    }

    std::string_view data_;
    bool little_ = true;
};

std::string_view find_exif_segment(std::string_view bytes) {
    auto u8 = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
    if (bytes.size() < 2 || u8(0) != 0xFF || u8(1) != 0xD8) throw Error("E-EXIF-NOT-JPEG", "not a JPEG file");
    std::size_t pos = 2;
    while (pos + 1 < bytes.size()) {
        if (u8(pos) != 0xFF) corrupt("expected JPEG marker");
        while (pos < bytes.size() && u8(pos) == 0xFF) ++pos;
        if (pos >= bytes.size()) break;
        auto marker = u8(pos++);
        if (marker == 0xD9 || marker == 0xDA) break;  // EOI / start of scan
        if (marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) continue;
        if (pos + 2 > bytes.size()) corrupt("segment length truncated");
        std::size_t len = u8(pos) << 8 | u8(pos + 1);
        if (len < 2 || pos + len > bytes.size()) corrupt("segment runs past end of file");
        auto body = bytes.substr(pos + 2, len - 2);
        if (marker == 0xE1 && body.substr(0, 6) == std::string_view("Exif\0\0", 6)) return body.substr(6);
        pos += len;
    }
    throw Error("E-EXIF-ABSENT", "JPEG has no EXIF segment");
}

bool digits(std::string_view s, std::size_t from, std::size_t n) {
    for (std::size_t i = from; i < from + n; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

/// `YYYY:MM:DD HH:MM:SS` -> `YYYY-MM-DDTHH:MM:SS`
std::optional<std::string> iso_datetime(std::string_view s) {
    if (s.size() != 19 || s[4] != ':' || s[7] != ':' || s[10] != ' ' || s[13] != ':' || s[16] != ':')
        return std::nullopt;
    if (!digits(s, 0, 4) || !digits(s, 5, 2) || !digits(s, 8, 2) || !digits(s, 11, 2) || !digits(s, 14, 2) ||
        !digits(s, 17, 2))
        return std::nullopt;
    std::string out(s);
    out[4] = '-';
    out[7] = '-';
    out[10] = 'T';
    return out;
}

std::optional<double> dms(const Tiff& t, const IfdEntry& e) {
    auto d = t.rational(e, 0), m = t.rational(e, 1), s = t.rational(e, 2);
    if (!d || !m || !s) return std::nullopt;
    return *d + *m / 60.0 + *s / 3600.0;
}

std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    return s == "-0.000000" ? "0.000000" : s;
}

}  // namespace

ExifRecord read_exif(std::string_view bytes) {
    Tiff tiff(find_exif_segment(bytes));
    ExifRecord rec;

    std::optional<std::uint32_t> exif_at, gps_at;
    for (const auto& e : tiff.ifd(tiff.u32(4))) {
        if (e.tag == kMake) rec.make = tiff.ascii(e);
        else if (e.tag == kModel) rec.model = tiff.ascii(e);
        else if (e.tag == kExifIfd && e.count == 1) exif_at = tiff.u32(e.value_offset);
        else if (e.tag == kGpsIfd && e.count == 1) gps_at = tiff.u32(e.value_offset);
    }
    if (rec.make && rec.make->empty()) rec.make.reset();
    if (rec.model && rec.model->empty()) rec.model.reset();

    if (exif_at) {
        for (const auto& e : tiff.ifd(*exif_at))
            if (e.tag == kDateTimeOriginal) rec.datetime_original = iso_datetime(tiff.ascii(e));
    }

    if (gps_at) {
        std::optional<double> lat, lon;
        char lat_ref = 'N', lon_ref = 'E';
        for (const auto& e : tiff.ifd(*gps_at)) {
            if (e.tag == kGpsLatRef && e.type == 2) lat_ref = tiff.ascii(e).empty() ? 'N' : tiff.ascii(e)[0];
            else if (e.tag == kGpsLonRef && e.type == 2) lon_ref = tiff.ascii(e).empty() ? 'E' : tiff.ascii(e)[0];
            else if (e.tag == kGpsLat) lat = dms(tiff, e);
            else if (e.tag == kGpsLon) lon = dms(tiff, e);
        }
        if (lat && lon && *lat <= 90 && *lon <= 180) {
            if (lat_ref == 'S') *lat = -*lat;
            if (lon_ref == 'W') *lon = -*lon;
            rec.gps = GpsPosition{*lat, *lon};
        }
    }
    return rec;
}

Block exif_to_block(const ExifRecord& rec, const std::string& name) {
    Block b;
    b.major = "Photo";
    b.name = name;
    auto add = [&](std::string minor, std::string payload) {
        MinorEntry m;
        m.minor = std::move(minor);
        m.payload = std::move(payload);
        b.minors.push_back(std::move(m));
    };
    if (rec.datetime_original) add("Date", *rec.datetime_original);
    if (rec.gps) {
        add("Latitude", fixed6(rec.gps->lat));
        add("Longitude", fixed6(rec.gps->lon));
    }
    if (rec.make) add("Make", *rec.make);
    if (rec.model) add("Model", *rec.model);
    return b;
}

}  // namespace medford
