#pragma once

// Core item model: identity, hashing and kind classification shared by
// every other component.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privfilter/md5.hpp"
#include "privfilter/text.hpp"

namespace privfilter {

enum class ItemKind { email, document, image, container, other };

inline std::string_view kind_name(ItemKind k) {
    switch (k) {
        case ItemKind::email: return "email";
        case ItemKind::document: return "document";
        case ItemKind::image: return "image";
        case ItemKind::container: return "container";
        case ItemKind::other: return "other";
    }
    return "other";
}

inline std::optional<ItemKind> kind_from_name(std::string_view s) {
    if (s == "email") return ItemKind::email;
    if (s == "document") return ItemKind::document;
    if (s == "image") return ItemKind::image;
    if (s == "container") return ItemKind::container;
    if (s == "other") return ItemKind::other;
    return std::nullopt;
}

struct EmailMetadata {
    std::vector<std::string> from_addresses;
    std::vector<std::string> to_addresses;
    std::vector<std::string> cc_addresses;
    std::vector<std::string> bcc_addresses;
    std::string subject;
    std::string date_raw;                  // header value as found, empty if absent
    std::optional<std::int64_t> date_epoch; // parsed when the header was understood
};

struct EvidenceItem {
    std::string guid;          // 32 hex chars, deterministic per tree position
    std::string source_path;   // corpus-relative; children use parent!name
    std::string original_name;
    ItemKind kind = ItemKind::other;
    std::string media_type;
    std::string md5;           // digest of the item's raw (decoded) bytes
    std::uint64_t size_bytes = 0;
    std::optional<std::string> text;  // normalized extracted text
    std::optional<EmailMetadata> email;
    std::string parent;               // guid, empty for top-level items
    std::vector<std::string> children;
    bool read_error = false;
};

/// Lowercase bare address: display name and angle brackets stripped.
inline std::string normalize_address(std::string_view raw) {
    std::string_view s = raw;
    auto lt = s.rfind('<');
    if (lt != std::string_view::npos) {
        auto gt = s.find('>', lt);
        s = s.substr(lt + 1, gt == std::string_view::npos ? std::string_view::npos : gt - lt - 1);
    }
    std::size_t b = 0, e = s.size();
    while (b < e && (is_ascii_space(static_cast<unsigned char>(s[b])) || s[b] == '"')) ++b;
    while (e > b && (is_ascii_space(static_cast<unsigned char>(s[e - 1])) || s[e - 1] == '"')) --e;
    return to_lower_ascii(s.substr(b, e - b));
}

namespace detail {

inline std::string extension_of(std::string_view name) {
    auto dot = name.rfind('.');
    if (dot == std::string_view::npos || dot + 1 == name.size()) return {};
    return to_lower_ascii(name.substr(dot + 1));
}

}  // namespace detail

/// Media type from the extension map with magic-byte overrides for the
/// signatures we recognize (ZIP, PDF, PNG, JPEG).
inline std::string detect_media_type(std::string_view name, std::string_view bytes) {
    if (bytes.size() >= 4) {
        if (bytes.substr(0, 4) == "%PDF") return "application/pdf";
        if (bytes.substr(0, 4) == std::string_view("PK\x03\x04", 4)) return "application/zip";
        if (bytes.substr(0, 4) == std::string_view("\x89PNG", 4)) return "image/png";
        if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xff &&
            static_cast<unsigned char>(bytes[1]) == 0xd8 &&
            static_cast<unsigned char>(bytes[2]) == 0xff)
            return "image/jpeg";
    }
    std::string ext = detail::extension_of(name);
    if (ext == "eml") return "message/rfc822";
    if (ext == "zip") return "application/zip";
    if (ext == "txt" || ext == "log" || ext == "md" || ext == "csv" || ext == "tsv")
        return "text/plain";
    if (ext == "html" || ext == "htm") return "text/html";
    if (ext == "pdf") return "application/pdf";
    if (ext == "docx")
        return "application/vnd.openxmlformats-officedocument.wordprocessingml.document";
    if (ext == "doc") return "application/msword";
    if (ext == "rtf") return "application/rtf";
    if (ext == "png") return "image/png";
    if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
    if (ext == "gif") return "image/gif";
    if (ext == "bmp") return "image/bmp";
    return "application/octet-stream";
}

inline bool is_office_media_type(std::string_view media) {
    return media == "application/vnd.openxmlformats-officedocument.wordprocessingml.document" ||
           media == "application/msword" || media == "application/rtf";
}

inline ItemKind classify_kind(std::string_view /*original_name*/, std::string_view media_type,
                              bool has_email_metadata) {
    if (has_email_metadata) return ItemKind::email;
    if (media_type == "application/zip") return ItemKind::container;
    if (media_type.substr(0, 6) == "image/") return ItemKind::image;
    if (media_type.substr(0, 5) == "text/" || media_type == "application/pdf" ||
        is_office_media_type(media_type))
        return ItemKind::document;
    return ItemKind::other;
}

/// GUIDs are a pure function of tree position (relative path plus the
/// chain of child ordinals) so repeated ingests of the same tree agree.
inline std::string guid_for_node(std::string_view node_key) {
    std::string salted = "privfilter-guid-v1|";
    salted.append(node_key);
    return compute_md5(salted);
}

inline std::string child_node_key(std::string_view parent_key, std::size_t ordinal) {
    return std::string(parent_key) + "|" + std::to_string(ordinal);
}

}  // namespace privfilter
