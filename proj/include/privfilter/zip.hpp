#pragma once

// Minimal ZIP container support: the reader handles stored and deflated
// entries via the central directory; the writer emits stored entries with
// a fixed timestamp so generated archives are byte-reproducible.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

namespace privfilter {

struct ZipEntry {
    std::string name;
    std::string bytes;
};

class ZipError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace zip_detail {

inline std::uint16_t rd16(std::string_view d, std::size_t off) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(d[off]) |
                                      (static_cast<unsigned char>(d[off + 1]) << 8));
}
inline std::uint32_t rd32(std::string_view d, std::size_t off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(d[off])) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(d[off + 1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(d[off + 2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(d[off + 3])) << 24);
}
inline void wr16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}
inline void wr32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::string inflate_raw(std::string_view comp, std::size_t expected) {
    std::string out(expected, '\0');
    z_stream zs{};
    if (inflateInit2(&zs, -15) != Z_OK) throw ZipError("inflate init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(comp.data()));
    zs.avail_in = static_cast<uInt>(comp.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected) throw ZipError("deflate stream corrupt");
    return out;
}

}  // namespace zip_detail

/// Entries in central-directory order. Throws ZipError on structural damage.
inline std::vector<ZipEntry> zip_read(std::string_view bytes) {
    using namespace zip_detail;
    if (bytes.size() < 22) throw ZipError("too short for an archive");
    // locate end-of-central-directory record
    std::size_t eocd = std::string_view::npos;
    std::size_t scan_floor = bytes.size() > 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
    for (std::size_t i = bytes.size() - 22 + 1; i-- > scan_floor;) {
        if (rd32(bytes, i) == 0x06054b50u) {
            eocd = i;
            break;
        }
    }
    if (eocd == std::string_view::npos) throw ZipError("central directory missing");
    std::uint16_t count = rd16(bytes, eocd + 10);
    std::uint32_t cd_off = rd32(bytes, eocd + 16);
    std::vector<ZipEntry> entries;
    std::size_t pos = cd_off;
    for (std::uint16_t n = 0; n < count; ++n) {
        if (pos + 46 > bytes.size() || rd32(bytes, pos) != 0x02014b50u)
            throw ZipError("central directory entry corrupt");
        std::uint16_t method = rd16(bytes, pos + 10);
        std::uint32_t comp_size = rd32(bytes, pos + 20);
        std::uint32_t uncomp_size = rd32(bytes, pos + 24);
        std::uint16_t name_len = rd16(bytes, pos + 28);
        std::uint16_t extra_len = rd16(bytes, pos + 30);
        std::uint16_t comment_len = rd16(bytes, pos + 32);
        std::uint32_t local_off = rd32(bytes, pos + 42);
        if (pos + 46 + name_len > bytes.size()) throw ZipError("entry name truncated");
        std::string name(bytes.substr(pos + 46, name_len));
        pos += 46u + name_len + extra_len + comment_len;

        if (local_off + 30 > bytes.size() || rd32(bytes, local_off) != 0x04034b50u)
            throw ZipError("local header corrupt");
        std::uint16_t l_name = rd16(bytes, local_off + 26);
        std::uint16_t l_extra = rd16(bytes, local_off + 28);
        std::size_t data_off = local_off + 30u + l_name + l_extra;
        if (data_off + comp_size > bytes.size()) throw ZipError("entry data truncated");
        std::string_view data = bytes.substr(data_off, comp_size);

        if (!name.empty() && name.back() == '/') continue;  // directory entry
        ZipEntry e;
        e.name = name;
        if (method == 0) {
            e.bytes = std::string(data);
        } else if (method == 8) {
            e.bytes = inflate_raw(data, uncomp_size);
        } else {
            throw ZipError("unsupported compression method " + std::to_string(method));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

/// Stored (uncompressed) archive with a fixed DOS timestamp.
inline std::string zip_write(const std::vector<ZipEntry>& entries) {
    using namespace zip_detail;
    constexpr std::uint16_t dos_time = (10 << 11) | (0 << 5) | 0;                 // 10:00:00
    constexpr std::uint16_t dos_date = ((2016 - 1980) << 9) | (7 << 5) | 8;       // 2016-07-08
    std::string out;
    struct CdRow {
        std::uint32_t crc, size, offset;
        std::string name;
    };
    std::vector<CdRow> cd;
    for (const auto& e : entries) {
        std::uint32_t crc = static_cast<std::uint32_t>(
            ::crc32(0L, reinterpret_cast<const Bytef*>(e.bytes.data()),
                    static_cast<uInt>(e.bytes.size())));
        cd.push_back({crc, static_cast<std::uint32_t>(e.bytes.size()),
                      static_cast<std::uint32_t>(out.size()), e.name});
        wr32(out, 0x04034b50u);
        wr16(out, 20);        // version needed
        wr16(out, 0);         // flags
        wr16(out, 0);         // method: stored
        wr16(out, dos_time);
        wr16(out, dos_date);
        wr32(out, crc);
        wr32(out, static_cast<std::uint32_t>(e.bytes.size()));
        wr32(out, static_cast<std::uint32_t>(e.bytes.size()));
        wr16(out, static_cast<std::uint16_t>(e.name.size()));
        wr16(out, 0);         // extra
        out.append(e.name);
        out.append(e.bytes);
    }
    std::uint32_t cd_start = static_cast<std::uint32_t>(out.size());
    for (const auto& r : cd) {
        wr32(out, 0x02014b50u);
        wr16(out, 20);  // version made by
        wr16(out, 20);  // version needed
        wr16(out, 0);
        wr16(out, 0);   // method
        wr16(out, dos_time);
        wr16(out, dos_date);
        wr32(out, r.crc);
        wr32(out, r.size);
        wr32(out, r.size);
        wr16(out, static_cast<std::uint16_t>(r.name.size()));
        wr16(out, 0);  // extra
        wr16(out, 0);  // comment
        wr16(out, 0);  // disk number
        wr16(out, 0);  // internal attrs
        wr32(out, 0);  // external attrs
        wr32(out, r.offset);
        out.append(r.name);
    }
    std::uint32_t cd_size = static_cast<std::uint32_t>(out.size()) - cd_start;
    wr32(out, 0x06054b50u);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, static_cast<std::uint16_t>(cd.size()));
    wr16(out, static_cast<std::uint16_t>(cd.size()));
    wr32(out, cd_size);
    wr32(out, cd_start);
    wr16(out, 0);  // comment length
    return out;
}

}  // namespace privfilter
