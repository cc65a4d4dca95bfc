#pragma once

// Text-only PDF rendering and extraction. The writer emits PDF 1.4 with a
// single standard monospaced font, uncompressed content streams and no
// timestamps, so renditions are byte-reproducible. The reader pulls the
// text-show strings back out of uncompressed streams; anything filtered
// or image-only yields no text.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace privfilter {

inline constexpr int kPdfColumns = 80;
inline constexpr int kPdfLinesPerPage = 60;

namespace pdf_detail {

inline std::string escape_pdf_string(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '(' || c == ')' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

/// Word-wrap into lines of at most `width` columns; hard-split overlong words.
inline std::vector<std::string> wrap_text(std::string_view text, std::size_t width) {
    std::vector<std::string> lines;
    std::string line;
    std::size_t i = 0;
    auto flush = [&] {
        lines.push_back(line);
        line.clear();
    };
    while (i < text.size()) {
        if (text[i] == '\n') {
            flush();
            ++i;
            continue;
        }
        std::size_t ws = text.find_first_of(" \n", i);
        std::string_view word = text.substr(i, ws == std::string_view::npos ? text.size() - i
                                                                            : ws - i);
        while (word.size() > width) {
            if (!line.empty()) flush();
            lines.emplace_back(word.substr(0, width));
            word.remove_prefix(width);
        }
        std::size_t need = word.size() + (line.empty() ? 0 : 1);
        if (line.size() + need > width) flush();
        if (!line.empty()) line.push_back(' ');
        line.append(word);
        i += (ws == std::string_view::npos ? text.size() - i : ws - i);
        if (i < text.size() && text[i] == ' ') ++i;
    }
    if (!line.empty()) lines.push_back(line);
    if (lines.empty()) lines.emplace_back();
    return lines;
}

}  // namespace pdf_detail

/// Render text as a paginated monospaced PDF document.
inline std::string pdf_render_text(std::string_view text) {
    using pdf_detail::escape_pdf_string;
    std::vector<std::string> lines = pdf_detail::wrap_text(text, kPdfColumns);
    std::vector<std::vector<std::string>> pages;
    for (std::size_t i = 0; i < lines.size(); i += kPdfLinesPerPage)
        pages.emplace_back(lines.begin() + static_cast<long>(i),
                           lines.begin() + static_cast<long>(std::min(
                               lines.size(), i + kPdfLinesPerPage)));
    if (pages.empty()) pages.emplace_back();

    // objects: 1 catalog, 2 pages root, 3 font, then (page, contents) pairs
    std::size_t n_pages = pages.size();
    std::vector<std::string> objects;
    std::string kids;
    for (std::size_t p = 0; p < n_pages; ++p) {
        if (!kids.empty()) kids.push_back(' ');
        kids += std::to_string(4 + p * 2) + " 0 R";
    }
    objects.push_back("<< /Type /Catalog /Pages 2 0 R >>");
    objects.push_back("<< /Type /Pages /Kids [" + kids + "] /Count " + std::to_string(n_pages) +
                      " >>");
    objects.push_back("<< /Type /Font /Subtype /Type1 /BaseFont /Courier >>");
    for (std::size_t p = 0; p < n_pages; ++p) {
        std::size_t content_obj = 5 + p * 2;
        objects.push_back(
            "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] /Resources << /Font << /F1 3 0 "
            "R >> >> /Contents " +
            std::to_string(content_obj) + " 0 R >>");
        std::string stream = "BT\n/F1 10 Tf\n12 TL\n72 756 Td\n";
        for (const auto& line : pages[p]) stream += "(" + escape_pdf_string(line) + ") Tj\nT*\n";
        stream += "ET\n";
        objects.push_back("<< /Length " + std::to_string(stream.size()) + " >>\nstream\n" + stream +
                          "endstream");
    }

    std::string out = "%PDF-1.4\n";
    std::vector<std::size_t> offsets;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        offsets.push_back(out.size());
        out += std::to_string(i + 1) + " 0 obj\n" + objects[i] + "\nendobj\n";
    }
    std::size_t xref_off = out.size();
    out += "xref\n0 " + std::to_string(objects.size() + 1) + "\n";
    out += "0000000000 65535 f \n";
    for (std::size_t off : offsets) {
        std::string o = std::to_string(off);
        out += std::string(10 - o.size(), '0') + o + " 00000 n \n";
    }
    out += "trailer\n<< /Size " + std::to_string(objects.size() + 1) +
           " /Root 1 0 R >>\nstartxref\n" + std::to_string(xref_off) + "\n%%EOF\n";
    return out;
}

namespace pdf_detail {

inline std::string unescape_pdf_string(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c != '\\') {
            out.push_back(c);
            ++i;
            continue;
        }
        if (i + 1 >= s.size()) break;
        char e = s[i + 1];
        switch (e) {
            case 'n': out.push_back('\n'); i += 2; break;
            case 'r': out.push_back('\r'); i += 2; break;
            case 't': out.push_back('\t'); i += 2; break;
            case 'b': out.push_back('\b'); i += 2; break;
            case 'f': out.push_back('\f'); i += 2; break;
            case '(': case ')': case '\\': out.push_back(e); i += 2; break;
            default:
                if (e >= '0' && e <= '7') {
                    int v = 0, k = 0;
                    i += 1;
                    while (k < 3 && i < s.size() && s[i] >= '0' && s[i] <= '7') {
                        v = v * 8 + (s[i] - '0');
                        ++i;
                        ++k;
                    }
                    out.push_back(static_cast<char>(v));
                } else {
                    out.push_back(e);
                    i += 2;
                }
        }
    }
    return out;
}

/// Pull string literals shown via Tj / ' / TJ out of one content stream.
inline void extract_shows(std::string_view stream, std::vector<std::string>& shows) {
    std::size_t i = 0;
    std::vector<std::string> pending;  // strings seen since last operator
    while (i < stream.size()) {
        char c = stream[i];
        if (c == '(') {
            std::string lit;
            int depth = 1;
            ++i;
            std::size_t start = i;
            while (i < stream.size() && depth > 0) {
                if (stream[i] == '\\') {
                    i += 2;
                    continue;
                }
                if (stream[i] == '(') ++depth;
                if (stream[i] == ')') --depth;
                ++i;
            }
            lit = unescape_pdf_string(stream.substr(start, i - start - 1));
            pending.push_back(std::move(lit));
            continue;
        }
        if (c == 'T' && i + 1 < stream.size() && (stream[i + 1] == 'j' || stream[i + 1] == 'J')) {
            for (auto& p : pending) shows.push_back(std::move(p));
            pending.clear();
            i += 2;
            continue;
        }
        if (c == '\'') {
            for (auto& p : pending) shows.push_back(std::move(p));
            pending.clear();
            ++i;
            continue;
        }
        if (!pending.empty() && (c == 'B' || c == 'E' || c == 'm' || c == 'l' || c == 'c'))
            pending.clear();  // strings consumed by non-text operators
        ++i;
    }
}

}  // namespace pdf_detail

/// Text of all uncompressed content streams, show strings joined by
/// newlines. std::nullopt when the file carries no extractable text.
inline std::optional<std::string> pdf_extract_text(std::string_view bytes) {
    if (bytes.substr(0, 5) != "%PDF-") return std::nullopt;
    std::vector<std::string> shows;
    std::size_t pos = 0;
    while (true) {
        std::size_t s = bytes.find("stream", pos);
        if (s == std::string_view::npos) break;
        // the preceding dictionary: give up on filtered streams
        std::size_t dict_start = bytes.rfind("<<", s);
        bool filtered = false;
        if (dict_start != std::string_view::npos) {
            std::string_view dict = bytes.substr(dict_start, s - dict_start);
            if (dict.find("/Filter") != std::string_view::npos) filtered = true;
        }
        std::size_t data_start = s + 6;
        if (data_start < bytes.size() && bytes[data_start] == '\r') ++data_start;
        if (data_start < bytes.size() && bytes[data_start] == '\n') ++data_start;
        std::size_t e = bytes.find("endstream", data_start);
        if (e == std::string_view::npos) break;
        if (!filtered)
            pdf_detail::extract_shows(bytes.substr(data_start, e - data_start), shows);
        pos = e + 9;
    }
    if (shows.empty()) return std::nullopt;
    std::string out;
    for (std::size_t i = 0; i < shows.size(); ++i) {
        if (i) out.push_back('\n');
        out += shows[i];
    }
    return out;
}

}  // namespace privfilter
