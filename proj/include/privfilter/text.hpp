#pragma once

// Text normalization and word tokenization shared by extraction, the
// shingle index and keyword search.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace privfilter {

inline bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

/// Collapse runs of whitespace to single spaces and trim the ends.
/// Invalid UTF-8 bytes are dropped; multi-byte sequences pass through.
inline std::string normalize_text(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < in.size()) {
        unsigned char c = static_cast<unsigned char>(in[i]);
        if (is_ascii_space(c)) {
            pending_space = !out.empty();
            ++i;
            continue;
        }
        std::size_t seq_len = 1;
        bool valid = true;
        if (c >= 0x80) {
            if ((c & 0xe0) == 0xc0) seq_len = 2;
            else if ((c & 0xf0) == 0xe0) seq_len = 3;
            else if ((c & 0xf8) == 0xf0) seq_len = 4;
            else valid = false;
            if (valid) {
                if (i + seq_len > in.size()) valid = false;
                for (std::size_t k = 1; valid && k < seq_len; ++k)
                    if ((static_cast<unsigned char>(in[i + k]) & 0xc0) != 0x80) valid = false;
            }
            if (!valid) {
                ++i;
                continue;
            }
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.append(in.substr(i, seq_len));
        i += seq_len;
    }
    return out;
}

/// Lowercased maximal runs of letters/digits, in document order.
/// ASCII alphanumerics are token characters; multi-byte UTF-8 sequences
/// are kept inside runs unchanged (no case folding beyond ASCII).
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (c >= 0x80) {
            cur.push_back(static_cast<char>(c));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

namespace detail {

inline void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

inline std::string decode_html_entities(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        if (in[i] != '&') {
            out.push_back(in[i++]);
            continue;
        }
        std::size_t semi = in.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(in[i++]);
            continue;
        }
        std::string_view name = in.substr(i + 1, semi - i - 1);
        if (name == "amp") out.push_back('&');
        else if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else if (name == "nbsp") out.push_back(' ');
        else if (!name.empty() && name[0] == '#') {
            unsigned long cp = 0;
            bool ok = false;
            try {
                if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X'))
                    cp = std::stoul(std::string(name.substr(2)), nullptr, 16), ok = true;
                else
                    cp = std::stoul(std::string(name.substr(1)), nullptr, 10), ok = true;
            } catch (...) {
                ok = false;
            }
            if (!ok || cp == 0 || cp > 0x10ffff) {
                out.append(in.substr(i, semi - i + 1));
            } else {
                append_utf8(out, cp);
            }
        } else {
            out.append(in.substr(i, semi - i + 1));
            i = semi + 1;
            continue;
        }
        i = semi + 1;
    }
    return out;
}

}  // namespace detail

/// Tag removal with entity decoding; script/style bodies are discarded.
inline std::string strip_html(std::string_view html) {
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    auto tag_name_at = [&](std::size_t pos) {
        std::string name;
        while (pos < html.size() && std::isalpha(static_cast<unsigned char>(html[pos])))
            name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(html[pos++]))));
        return name;
    };
    while (i < html.size()) {
        if (html[i] != '<') {
            out.push_back(html[i++]);
            continue;
        }
        std::size_t name_start = i + 1;
        std::string name = tag_name_at(name_start);
        if (name == "script" || name == "style") {
            std::string close = "</" + name;
            std::size_t end = html.size();
            for (std::size_t j = i + 1; j + close.size() <= html.size(); ++j) {
                if (to_lower_ascii(html.substr(j, close.size())) == close) {
                    end = html.find('>', j);
                    if (end == std::string_view::npos) end = html.size();
                    else ++end;
                    break;
                }
            }
            i = end;
            out.push_back(' ');
            continue;
        }
        std::size_t close = html.find('>', i);
        if (close == std::string_view::npos) break;
        out.push_back(' ');
        i = close + 1;
    }
    return detail::decode_html_entities(out);
}

}  // namespace privfilter
