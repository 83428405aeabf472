#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace medford::zip {

struct Entry {
    std::string name;  // '/'-separated
    std::string data;
};

/// Stored (uncompressed) archive with every timestamp fixed at 1980-01-01
/// 00:00, so identical inputs give identical bytes. Throws medford::Error
/// (E-BAG-IO) past the 4 GiB / 65535-entry limits of the classic format.
std::string write(const std::vector<Entry>& entries);

/// Reads stored and deflated entries. CRCs are not checked here; callers
/// verify content themselves. Throws medford::Error (E-BAG-STRUCTURE) on a
/// malformed archive.
std::vector<Entry> read(std::string_view archive);

/// Byte offset of an entry's data inside `archive`, for tests that tamper
/// with payloads.
std::size_t data_offset(std::string_view archive, std::string_view name);

std::uint32_t crc32(std::string_view data);

}  // namespace medford::zip
