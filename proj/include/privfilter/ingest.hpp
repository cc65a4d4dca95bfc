#pragma once

// Evidence tree ingestion: every regular file becomes a top-level item;
// e-mails and containers are expanded recursively into families. The walk
// is deterministic (lexicographic paths, stable child ordinals) so that
// re-ingesting a tree reproduces guids, digests and text exactly.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "privfilter/evidence.hpp"
#include "privfilter/mime.hpp"
#include "privfilter/pdf.hpp"
#include "privfilter/text.hpp"
#include "privfilter/zip.hpp"

namespace privfilter {

struct CorpusSnapshot {
    std::filesystem::path root;
    std::map<std::string, EvidenceItem> items;  // keyed by guid, sorted
    std::vector<std::string> top_level;         // guids in path order
    std::vector<std::string> warnings;          // ingest report lines (may name paths)

    const EvidenceItem* find(const std::string& guid) const {
        auto it = items.find(guid);
        return it == items.end() ? nullptr : &it->second;
    }
    const EvidenceItem& at(const std::string& guid) const {
        auto it = items.find(guid);
        if (it == items.end()) throw std::out_of_range("unknown item guid: " + guid);
        return it->second;
    }

    /// All descendants of `guid` (not including the item itself).
    std::vector<std::string> descendants(const std::string& guid) const {
        std::vector<std::string> out, stack{guid};
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            auto it = items.find(cur);
            if (it == items.end()) continue;
            for (const auto& c : it->second.children) {
                out.push_back(c);
                stack.push_back(c);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace ingest_detail {

inline std::optional<std::string> read_file(const std::filesystem::path& p, std::string& err) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        err = "cannot open";
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        err = "read failed";
        return std::nullopt;
    }
    return ss.str();
}

inline bool looks_like_utf8_text(std::string_view bytes) {
    std::size_t printable = 0, total = 0;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        if (c == 0) return false;
        ++total;
        if (c >= 0x20 || c == '\n' || c == '\r' || c == '\t') ++printable;
    }
    return total == 0 || printable * 100 >= total * 95;
}

struct Builder {
    CorpusSnapshot& corpus;
    int max_depth = 16;

    /// Ingest one blob at a tree position; recurses into e-mail and
    /// container children. Returns the new item's guid.
    std::string add(const std::string& node_key, const std::string& source_path,
                    const std::string& name, const std::string& bytes,
                    const std::string& parent_guid, int depth) {
        EvidenceItem item;
        item.guid = guid_for_node(node_key);
        item.source_path = source_path;
        item.original_name = name;
        item.md5 = compute_md5(bytes);
        item.size_bytes = bytes.size();
        item.media_type = detect_media_type(name, bytes);
        item.parent = parent_guid;

        std::optional<ParsedEmail> mail;
        if (item.media_type == "message/rfc822") {
            mail = parse_email(bytes);
            if (!mail) {
                corpus.warnings.push_back("malformed e-mail headers, ingested as document: " +
                                          source_path);
                item.media_type = "text/plain";
            }
        }
        if (mail) {
            item.email = mail->meta;
            std::string body = normalize_text(mail->body_text);
            if (!body.empty()) item.text = body;
        } else {
            item.text = extract_text_for(item.media_type, bytes);
        }
        item.kind = mail ? ItemKind::email : classify_kind(name, item.media_type, false);

        // place the item before recursing so children can link to it
        std::string guid = item.guid;
        corpus.items.emplace(guid, std::move(item));

        if (depth < max_depth) {
            if (mail) {
                std::size_t ordinal = 0;
                for (const auto& att : mail->attachments) {
                    std::string child_key = child_node_key(node_key, ordinal++);
                    std::string child_guid =
                        add(child_key, source_path + "!" + att.filename, att.filename, att.bytes,
                            guid, depth + 1);
                    corpus.items.at(guid).children.push_back(child_guid);
                }
            } else if (corpus.items.at(guid).kind == ItemKind::container) {
                try {
                    std::vector<ZipEntry> entries = zip_read(bytes);
                    std::size_t ordinal = 0;
                    for (const auto& e : entries) {
                        std::string child_key = child_node_key(node_key, ordinal++);
                        std::string child_guid = add(child_key, source_path + "!" + e.name,
                                                     e.name, e.bytes, guid, depth + 1);
                        corpus.items.at(guid).children.push_back(child_guid);
                    }
                } catch (const ZipError& ex) {
                    corpus.warnings.push_back(std::string("corrupt archive (") + ex.what() +
                                              "): " + source_path);
                }
            }
        }
        return guid;
    }

    static std::optional<std::string> extract_text_for(const std::string& media,
                                                       const std::string& bytes) {
        if (media.substr(0, 5) == "text/") {
            std::string t = media == "text/html" ? normalize_text(strip_html(bytes))
                                                 : normalize_text(bytes);
            if (!t.empty()) return t;
            return std::nullopt;
        }
        if (media == "application/pdf") {
            auto raw = pdf_extract_text(bytes);
            if (!raw) return std::nullopt;
            std::string t = normalize_text(*raw);
            if (t.empty()) return std::nullopt;
            return t;
        }
        if (is_office_media_type(media)) {
            // corpus convention: office-extension files carry plain text
            if (!looks_like_utf8_text(bytes)) return std::nullopt;
            std::string t = normalize_text(bytes);
            if (t.empty()) return std::nullopt;
            return t;
        }
        return std::nullopt;
    }
};

}  // namespace ingest_detail

/// Walk an evidence tree into a snapshot. Unreadable root is fatal;
/// unreadable single files become kind=other items with a warning.
inline CorpusSnapshot scan_evidence(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::exists(root) || !fs::is_directory(root))
        throw IngestError("evidence root does not exist or is not a directory: " + root.string());

    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(
             root, fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_regular_file()) files.push_back(it->path());
    }
    std::vector<std::string> rel;
    rel.reserve(files.size());
    for (const auto& p : files) rel.push_back(fs::relative(p, root).generic_string());
    std::sort(rel.begin(), rel.end());

    CorpusSnapshot corpus;
    corpus.root = root;
    ingest_detail::Builder builder{corpus};
    for (const auto& r : rel) {
        std::string err;
        auto bytes = ingest_detail::read_file(root / r, err);
        std::string name = fs::path(r).filename().string();
        if (!bytes) {
            EvidenceItem item;
            item.guid = guid_for_node(r);
            item.source_path = r;
            item.original_name = name;
            item.kind = ItemKind::other;
            item.media_type = "application/octet-stream";
            item.md5 = compute_md5("");
            item.read_error = true;
            corpus.warnings.push_back("unreadable file (" + err + "): " + r);
            corpus.top_level.push_back(item.guid);
            corpus.items.emplace(item.guid, std::move(item));
            continue;
        }
        corpus.top_level.push_back(builder.add(r, r, name, *bytes, "", 0));
    }
    return corpus;
}

/// PDF items with no extractable text; the caller surfaces the warning
/// before any filtering starts.
inline std::vector<std::string> detect_unsearchable(const CorpusSnapshot& corpus) {
    std::vector<std::string> out;
    for (const auto& [guid, item] : corpus.items)
        if (item.media_type == "application/pdf" && !item.text) out.push_back(guid);
    return out;
}

inline std::string unsearchable_warning(std::size_t count) {
    return "Warning: " + std::to_string(count) +
           " PDF item(s) contain no searchable text. It is advised to run Optical Character "
           "Recognition over these items before filtering, otherwise related content may be "
           "missed.";
}

}  // namespace privfilter
