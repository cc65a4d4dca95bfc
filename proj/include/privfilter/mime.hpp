#pragma once

// RFC-5322 message parsing with MIME multipart support: address headers,
// body text assembly and attachment extraction. Covers what the ingest
// pipeline needs for .eml evidence; exotic encodings are out of scope.

#include <cctype>
#include <ctime>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privfilter/evidence.hpp"
#include "privfilter/text.hpp"

namespace privfilter {

// ---------------------------------------------------------------------------
// transfer encodings

inline std::string base64_encode(std::string_view in) {
    static constexpr char tbl[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= in.size()) {
        unsigned v = (static_cast<unsigned char>(in[i]) << 16) |
                     (static_cast<unsigned char>(in[i + 1]) << 8) |
                     static_cast<unsigned char>(in[i + 2]);
        out.push_back(tbl[(v >> 18) & 63]);
        out.push_back(tbl[(v >> 12) & 63]);
        out.push_back(tbl[(v >> 6) & 63]);
        out.push_back(tbl[v & 63]);
        i += 3;
    }
    if (i + 1 == in.size()) {
        unsigned v = static_cast<unsigned char>(in[i]) << 16;
        out.push_back(tbl[(v >> 18) & 63]);
        out.push_back(tbl[(v >> 12) & 63]);
        out.append("==");
    } else if (i + 2 == in.size()) {
        unsigned v = (static_cast<unsigned char>(in[i]) << 16) |
                     (static_cast<unsigned char>(in[i + 1]) << 8);
        out.push_back(tbl[(v >> 18) & 63]);
        out.push_back(tbl[(v >> 12) & 63]);
        out.push_back(tbl[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

/// Base64 text wrapped at 76 columns, as emitted in MIME bodies.
inline std::string base64_encode_wrapped(std::string_view in) {
    std::string flat = base64_encode(in);
    std::string out;
    out.reserve(flat.size() + flat.size() / 76 * 2 + 2);
    for (std::size_t i = 0; i < flat.size(); i += 76) {
        out.append(flat.substr(i, 76));
        out.append("\r\n");
    }
    return out;
}

inline std::string base64_decode(std::string_view in) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::string out;
    out.reserve(in.size() / 4 * 3);
    unsigned acc = 0;
    int bits = 0;
    for (char c : in) {
        int v = val(c);
        if (v < 0) continue;  // skip whitespace/padding
        acc = (acc << 6) | static_cast<unsigned>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((acc >> bits) & 0xff));
        }
    }
    return out;
}

inline std::string quoted_printable_decode(std::string_view in) {
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        char c = in[i];
        if (c != '=') {
            out.push_back(c);
            ++i;
            continue;
        }
        if (i + 1 < in.size() && in[i + 1] == '\n') {
            i += 2;  // soft break
        } else if (i + 2 < in.size() && in[i + 1] == '\r' && in[i + 2] == '\n') {
            i += 3;  // soft break
        } else if (i + 2 < in.size() && hex(in[i + 1]) >= 0 && hex(in[i + 2]) >= 0) {
            out.push_back(static_cast<char>(hex(in[i + 1]) * 16 + hex(in[i + 2])));
            i += 3;
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// message structure

struct ParsedEmail {
    EmailMetadata meta;
    std::string body_text;  // assembled from inline text parts, not yet normalized
    struct Attachment {
        std::string filename;
        std::string bytes;       // transfer-decoded
        bool is_message = false; // message/rfc822 part
    };
    std::vector<Attachment> attachments;
};

namespace mime_detail {

struct HeaderBlock {
    // field name lowercased; repeated fields keep last occurrence except
    // address fields, which accumulate
    std::vector<std::pair<std::string, std::string>> fields;

    std::string get(std::string_view name) const {
        for (const auto& [k, v] : fields)
            if (k == name) return v;
        return {};
    }
    std::vector<std::string> get_all(std::string_view name) const {
        std::vector<std::string> out;
        for (const auto& [k, v] : fields)
            if (k == name) out.push_back(v);
        return out;
    }
};

/// Split header block from body at the first empty line; unfold
/// continuation lines. Returns false when no well-formed header line
/// exists at the top of the message.
inline bool split_headers(std::string_view raw, HeaderBlock& hdrs, std::string_view& body) {
    std::size_t pos = 0;
    std::string current;
    bool any = false;
    auto commit = [&] {
        if (current.empty()) return;
        auto colon = current.find(':');
        if (colon == std::string::npos || colon == 0) {
            current.clear();
            return;
        }
        std::string name = to_lower_ascii(std::string_view(current).substr(0, colon));
        std::size_t vs = colon + 1;
        while (vs < current.size() && (current[vs] == ' ' || current[vs] == '\t')) ++vs;
        hdrs.fields.emplace_back(name, current.substr(vs));
        any = true;
        current.clear();
    };
    while (pos < raw.size()) {
        std::size_t eol = raw.find('\n', pos);
        std::string_view line = raw.substr(pos, eol == std::string_view::npos ? raw.size() - pos
                                                                              : eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        std::size_t next = eol == std::string_view::npos ? raw.size() : eol + 1;
        if (line.empty()) {
            commit();
            body = raw.substr(next);
            return any;
        }
        if (line[0] == ' ' || line[0] == '\t') {
            // continuation
            if (current.empty()) return false;
            current.push_back(' ');
            std::size_t s = 0;
            while (s < line.size() && (line[s] == ' ' || line[s] == '\t')) ++s;
            current.append(line.substr(s));
        } else {
            commit();
            if (line.find(':') == std::string_view::npos) return false;
            current.assign(line);
        }
        pos = next;
    }
    commit();
    body = std::string_view{};
    return any;
}

/// Split an address header on commas, honoring quoted strings and
/// angle-bracket groups, then normalize each mailbox.
inline std::vector<std::string> parse_address_list(std::string_view value) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false, angled = false;
    auto commit = [&] {
        std::string addr = normalize_address(cur);
        if (!addr.empty() && addr.find('@') != std::string::npos) out.push_back(addr);
        cur.clear();
    };
    for (char c : value) {
        if (c == '"') quoted = !quoted;
        if (!quoted) {
            if (c == '<') angled = true;
            if (c == '>') angled = false;
            if (c == ',' && !angled) {
                commit();
                continue;
            }
        }
        cur.push_back(c);
    }
    commit();
    return out;
}

inline std::optional<std::int64_t> parse_rfc_date(const std::string& value) {
    std::tm tm{};
    const char* rest = ::strptime(value.c_str(), "%a, %d %b %Y %H:%M:%S", &tm);
    if (!rest) rest = ::strptime(value.c_str(), "%d %b %Y %H:%M:%S", &tm);
    if (!rest) return std::nullopt;
    std::int64_t epoch = ::timegm(&tm);
    while (*rest == ' ') ++rest;
    if ((*rest == '+' || *rest == '-') && std::isdigit(static_cast<unsigned char>(rest[1]))) {
        int sign = *rest == '-' ? -1 : 1;
        int hh = (rest[1] - '0') * 10 + (rest[2] - '0');
        int mm = (rest[3] - '0') * 10 + (rest[4] - '0');
        epoch -= sign * (hh * 3600 + mm * 60);
    }
    return epoch;
}

struct ContentType {
    std::string type;  // lowercased media type
    std::map<std::string, std::string> params;
};

inline ContentType parse_content_type(std::string_view value) {
    ContentType ct;
    std::size_t semi = value.find(';');
    ct.type = to_lower_ascii(value.substr(0, semi));
    // trim
    while (!ct.type.empty() && is_ascii_space(static_cast<unsigned char>(ct.type.back())))
        ct.type.pop_back();
    while (!ct.type.empty() && is_ascii_space(static_cast<unsigned char>(ct.type.front())))
        ct.type.erase(ct.type.begin());
    while (semi != std::string_view::npos) {
        std::size_t start = semi + 1;
        semi = std::string_view::npos;
        // find next ';' outside quotes
        bool q = false;
        std::size_t end = value.size();
        for (std::size_t i = start; i < value.size(); ++i) {
            if (value[i] == '"') q = !q;
            if (value[i] == ';' && !q) {
                end = i;
                semi = i;
                break;
            }
        }
        std::string_view param = value.substr(start, end - start);
        auto eq = param.find('=');
        if (eq == std::string_view::npos) continue;
        std::string key = to_lower_ascii(param.substr(0, eq));
        while (!key.empty() && is_ascii_space(static_cast<unsigned char>(key.front())))
            key.erase(key.begin());
        while (!key.empty() && is_ascii_space(static_cast<unsigned char>(key.back())))
            key.pop_back();
        std::string_view val = param.substr(eq + 1);
        while (!val.empty() && is_ascii_space(static_cast<unsigned char>(val.front())))
            val.remove_prefix(1);
        while (!val.empty() && is_ascii_space(static_cast<unsigned char>(val.back())))
            val.remove_suffix(1);
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        ct.params[key] = std::string(val);
    }
    return ct;
}

inline std::string decode_body(std::string_view body, std::string_view cte) {
    std::string enc = to_lower_ascii(cte);
    while (!enc.empty() && is_ascii_space(static_cast<unsigned char>(enc.back()))) enc.pop_back();
    if (enc == "base64") return base64_decode(body);
    if (enc == "quoted-printable") return quoted_printable_decode(body);
    return std::string(body);  // 7bit / 8bit / binary / absent
}

/// Split a multipart body into its parts given the boundary token.
inline std::vector<std::string_view> split_multipart(std::string_view body,
                                                     const std::string& boundary) {
    std::vector<std::string_view> parts;
    std::string open = "--" + boundary;
    std::vector<std::size_t> marks;  // offsets of boundary-line starts
    std::size_t pos = 0;
    bool at_line_start = true;
    while (pos < body.size()) {
        if (at_line_start && body.compare(pos, open.size(), open) == 0) marks.push_back(pos);
        std::size_t eol = body.find('\n', pos);
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
        at_line_start = true;
    }
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
        std::size_t start = body.find('\n', marks[i]);
        if (start == std::string_view::npos) break;
        ++start;
        // strip the CRLF that belongs to the next boundary line
        std::size_t part_end = marks[i + 1];
        if (part_end > start && body[part_end - 1] == '\n') --part_end;
        if (part_end > start && body[part_end - 1] == '\r') --part_end;
        parts.push_back(body.substr(start, part_end - start));
        std::string_view after = body.substr(marks[i + 1] + open.size());
        if (after.substr(0, 2) == "--") break;  // closing marker
    }
    return parts;
}

struct PartSink {
    std::string body_text;
    std::vector<ParsedEmail::Attachment> attachments;
};

inline void walk_part(std::string_view part_raw, PartSink& sink, int depth);

inline void handle_leaf(const HeaderBlock& hdrs, std::string_view body, PartSink& sink,
                        int depth) {
    ContentType ct = parse_content_type(hdrs.get("content-type"));
    if (ct.type.empty()) ct.type = "text/plain";
    std::string cte = hdrs.get("content-transfer-encoding");

    std::string filename;
    ContentType cd = parse_content_type(hdrs.get("content-disposition"));
    auto it = cd.params.find("filename");
    if (it != cd.params.end()) filename = it->second;
    if (filename.empty()) {
        auto nm = ct.params.find("name");
        if (nm != ct.params.end()) filename = nm->second;
    }
    bool is_attachment_disposition = cd.type == "attachment";

    if (ct.type == "message/rfc822") {
        ParsedEmail::Attachment att;
        att.filename = filename.empty() ? "embedded.eml" : filename;
        att.bytes = decode_body(body, cte);
        att.is_message = true;
        sink.attachments.push_back(std::move(att));
        return;
    }
    if (ct.type.substr(0, 10) == "multipart/") {
        auto b = ct.params.find("boundary");
        if (b == ct.params.end() || depth > 8) return;
        for (std::string_view sub : split_multipart(body, b->second)) walk_part(sub, sink, depth + 1);
        return;
    }
    if (!filename.empty() || is_attachment_disposition) {
        ParsedEmail::Attachment att;
        att.filename = filename.empty() ? "attachment.bin" : filename;
        att.bytes = decode_body(body, cte);
        sink.attachments.push_back(std::move(att));
        return;
    }
    if (ct.type == "text/plain") {
        if (!sink.body_text.empty()) sink.body_text.push_back('\n');
        sink.body_text.append(decode_body(body, cte));
    } else if (ct.type == "text/html") {
        if (!sink.body_text.empty()) sink.body_text.push_back('\n');
        sink.body_text.append(strip_html(decode_body(body, cte)));
    }
    // unnamed parts of other types carry no extractable content for us
}

inline void walk_part(std::string_view part_raw, PartSink& sink, int depth) {
    HeaderBlock hdrs;
    std::string_view body;
    if (!split_headers(part_raw, hdrs, body)) {
        // header-less part: treat the whole thing as plain text
        if (!sink.body_text.empty()) sink.body_text.push_back('\n');
        sink.body_text.append(part_raw);
        return;
    }
    handle_leaf(hdrs, body, sink, depth);
}

}  // namespace mime_detail

/// Parse one RFC-5322 message. Returns std::nullopt when the header block
/// is malformed; the caller then ingests the file as an opaque document.
inline std::optional<ParsedEmail> parse_email(std::string_view raw) {
    mime_detail::HeaderBlock hdrs;
    std::string_view body;
    if (!mime_detail::split_headers(raw, hdrs, body)) return std::nullopt;
    if (hdrs.get("from").empty() && hdrs.get("to").empty() && hdrs.get("subject").empty() &&
        hdrs.get("date").empty() && hdrs.get("message-id").empty())
        return std::nullopt;

    ParsedEmail out;
    for (const auto& v : hdrs.get_all("from"))
        for (auto& a : mime_detail::parse_address_list(v)) out.meta.from_addresses.push_back(a);
    for (const auto& v : hdrs.get_all("to"))
        for (auto& a : mime_detail::parse_address_list(v)) out.meta.to_addresses.push_back(a);
    for (const auto& v : hdrs.get_all("cc"))
        for (auto& a : mime_detail::parse_address_list(v)) out.meta.cc_addresses.push_back(a);
    for (const auto& v : hdrs.get_all("bcc"))
        for (auto& a : mime_detail::parse_address_list(v)) out.meta.bcc_addresses.push_back(a);
    out.meta.subject = hdrs.get("subject");
    out.meta.date_raw = hdrs.get("date");
    if (!out.meta.date_raw.empty())
        out.meta.date_epoch = mime_detail::parse_rfc_date(out.meta.date_raw);

    mime_detail::PartSink sink;
    mime_detail::handle_leaf(hdrs, body, sink, 0);
    out.body_text = std::move(sink.body_text);
    out.attachments = std::move(sink.attachments);
    return out;
}

}  // namespace privfilter
