#include "medford/zip.hpp"

#include <limits>

#include <zlib.h>

#include "medford/diagnostic.hpp"

namespace medford::zip {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint16_t kUtf8Flag = 0x0800;
constexpr std::uint16_t kDosDate1980 = (0 << 9) | (1 << 5) | 1;

void put16(std::string& out, std::uint16_t v) {
    out += static_cast<char>(v & 0xFF);
    out += static_cast<char>(v >> 8);
}

void put32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

class Cursor {
public:
    Cursor(std::string_view data, std::size_t pos) : data_(data), pos_(pos) {}

    std::uint16_t u16() {
        need(2);
        auto v = static_cast<std::uint16_t>(byte(0) | (byte(1) << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = byte(0) | (byte(1) << 8) | (byte(2) << 16) | (static_cast<std::uint32_t>(byte(3)) << 24);
        pos_ += 4;
        return v;
    }
    std::string_view bytes(std::size_t n) {
        need(n);
        auto v = data_.substr(pos_, n);
        pos_ += n;
        return v;
    }
    void skip(std::size_t n) { bytes(n); }
    std::size_t pos() const { return pos_; }

private:
    std::uint32_t byte(std::size_t k) const { return static_cast<unsigned char>(data_[pos_ + k]); }
    void need(std::size_t n) const {
        if (pos_ > data_.size() || data_.size() - pos_ < n) throw Error("E-BAG-STRUCTURE", "truncated zip archive");
    }

    std::string_view data_;
    std::size_t pos_;
};

struct CentralRecord {
    std::string name;
    std::uint16_t method = 0;
    std::uint32_t compressed = 0;
    std::uint32_t size = 0;
    std::uint32_t local_offset = 0;
};

std::vector<CentralRecord> central_directory(std::string_view archive) {
    if (archive.size() < 22) throw Error("E-BAG-STRUCTURE", "file is too small to be a zip archive");
    std::size_t eocd = std::string_view::npos;
    std::size_t lowest = archive.size() > 22 + 0xFFFF ? archive.size() - 22 - 0xFFFF : 0;
    for (std::size_t i = archive.size() - 22 + 1; i-- > lowest;) {
        if (Cursor(archive, i).u32() == kEndSig) {
            eocd = i;
            break;
        }
    }
    if (eocd == std::string_view::npos) throw Error("E-BAG-STRUCTURE", "no zip end-of-central-directory record");

    Cursor end(archive, eocd + 10);
    std::uint16_t count = end.u16();
    end.u32();  // central directory size
    std::uint32_t cd_offset = end.u32();

    std::vector<CentralRecord> out;
    Cursor c(archive, cd_offset);
    for (std::uint16_t i = 0; i < count; ++i) {
        if (c.u32() != kCentralSig) throw Error("E-BAG-STRUCTURE", "corrupt zip central directory");
        c.skip(6);  // version made by, version needed, flags
        CentralRecord r;
        r.method = c.u16();
        c.skip(8);  // time, date, crc
        r.compressed = c.u32();
        r.size = c.u32();
        auto name_len = c.u16();
        auto extra_len = c.u16();
        auto comment_len = c.u16();
        c.skip(8);  // disk, internal attrs, external attrs
        r.local_offset = c.u32();
        r.name = std::string(c.bytes(name_len));
        c.skip(static_cast<std::size_t>(extra_len) + comment_len);
        out.push_back(std::move(r));
    }
    return out;
}

std::size_t local_data_offset(std::string_view archive, const CentralRecord& r) {
    Cursor l(archive, r.local_offset);
    if (l.u32() != kLocalSig) throw Error("E-BAG-STRUCTURE", "corrupt zip local header for " + r.name);
    l.skip(22);
    auto name_len = l.u16();
    auto extra_len = l.u16();
    l.skip(static_cast<std::size_t>(name_len) + extra_len);
    return l.pos();
}

std::string inflate_raw(std::string_view in, std::size_t expected, const std::string& name) {
    std::string out(expected, '\0');
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error("E-BAG-STRUCTURE", "zlib init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected)
        throw Error("E-BAG-STRUCTURE", "cannot decompress zip entry " + name);
    return out;
}

}  // namespace

std::uint32_t crc32(std::string_view data) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

std::string write(const std::vector<Entry>& entries) {
    constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
    if (entries.size() > 0xFFFF) throw Error("E-BAG-IO", "too many files for a zip archive");

    std::string out;
    std::string central;
    for (const auto& e : entries) {
        if (e.data.size() >= kMax || out.size() >= kMax || e.name.size() > 0xFFFF)
            throw Error("E-BAG-IO", "zip entry too large: " + e.name);
        auto crc = crc32(e.data);
        auto offset = static_cast<std::uint32_t>(out.size());
        auto size = static_cast<std::uint32_t>(e.data.size());
        auto name_len = static_cast<std::uint16_t>(e.name.size());

        put32(out, kLocalSig);
        put16(out, 20);
        put16(out, kUtf8Flag);
        put16(out, 0);  // stored
        put16(out, 0);  // time
        put16(out, kDosDate1980);
        put32(out, crc);
        put32(out, size);
        put32(out, size);
        put16(out, name_len);
        put16(out, 0);
        out += e.name;
        out += e.data;

        put32(central, kCentralSig);
        put16(central, (3 << 8) | 20);  // made by: unix, 2.0
        put16(central, 20);
        put16(central, kUtf8Flag);
        put16(central, 0);
        put16(central, 0);
        put16(central, kDosDate1980);
        put32(central, crc);
        put32(central, size);
        put32(central, size);
        put16(central, name_len);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, 0100644u << 16);
        put32(central, offset);
        central += e.name;
    }
    if (out.size() >= kMax) throw Error("E-BAG-IO", "zip archive too large");
    auto cd_offset = static_cast<std::uint32_t>(out.size());
    out += central;
    put32(out, kEndSig);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint16_t>(entries.size()));
    put16(out, static_cast<std::uint16_t>(entries.size()));
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, cd_offset);
    put16(out, 0);
    return out;
}

std::vector<Entry> read(std::string_view archive) {
    std::vector<Entry> out;
    for (const auto& r : central_directory(archive)) {
        if (!r.name.empty() && r.name.back() == '/') continue;  // directory entry
        auto start = local_data_offset(archive, r);
        if (start > archive.size() || archive.size() - start < r.compressed)
            throw Error("E-BAG-STRUCTURE", "zip entry " + r.name + " runs past the end of the archive");
        auto raw = archive.substr(start, r.compressed);
        if (r.method == 0) {
            out.push_back({r.name, std::string(raw)});
        } else if (r.method == 8) {
            out.push_back({r.name, inflate_raw(raw, r.size, r.name)});
        } else {
            throw Error("E-BAG-STRUCTURE", "unsupported zip compression method for " + r.name);
        }
    }
    return out;
}

std::size_t data_offset(std::string_view archive, std::string_view name) {
    for (const auto& r : central_directory(archive))
        if (r.name == name) return local_data_offset(archive, r);
    throw Error("E-BAG-STRUCTURE", "no zip entry named " + std::string(name));
}

}  // namespace medford::zip
