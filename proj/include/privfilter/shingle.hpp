#pragma once

// Word shingles, resemblance and the inverted index behind near-duplicate
// queries. Queries are exact: candidates come from the postings, the final
// ratio is the true intersection-over-union of the two shingle sets, so
// results match a brute-force pairwise computation.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "privfilter/ingest.hpp"
#include "privfilter/text.hpp"

namespace privfilter {

struct ShingleConfig {
    int window = 5;
    double threshold = 0.9;
};

/// One shingle per consecutive window of `window` tokens, keyed by the
/// tokens joined with single spaces. Fewer tokens than the window yields
/// an empty set.
inline std::set<std::string> shingle_set(const std::vector<std::string>& tokens, int window) {
    std::set<std::string> out;
    if (window < 2 || tokens.size() < static_cast<std::size_t>(window)) return out;
    for (std::size_t i = 0; i + static_cast<std::size_t>(window) <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (std::size_t k = 1; k < static_cast<std::size_t>(window); ++k) {
            key.push_back(' ');
            key.append(tokens[i + k]);
        }
        out.insert(std::move(key));
    }
    return out;
}

inline std::set<std::string> shingles_of_text(std::string_view text, int window) {
    return shingle_set(tokenize(text), window);
}

/// Jaccard resemblance |A∩B| / |A∪B|; zero when either set is empty.
inline double resemblance(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() || b.empty()) return 0.0;
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        int cmp = ia->compare(*ib);
        if (cmp == 0) {
            ++common;
            ++ia;
            ++ib;
        } else if (cmp < 0) {
            ++ia;
        } else {
            ++ib;
        }
    }
    std::size_t uni = a.size() + b.size() - common;
    return static_cast<double>(common) / static_cast<double>(uni);
}

struct NearDupIndex {
    int window = 5;
    // shingle key -> guids of items containing it (ascending)
    std::unordered_map<std::string, std::vector<std::string>> postings;
    // guid -> shingle-set cardinality
    std::unordered_map<std::string, std::size_t> sizes;
    // guid -> that item's shingles (internal, lets queries avoid re-tokenizing)
    std::unordered_map<std::string, std::vector<const std::string*>> item_shingles;

    bool contains(const std::string& guid) const { return sizes.count(guid) > 0; }
};

/// Index every item that has text and a non-empty shingle set.
inline NearDupIndex build_index(const CorpusSnapshot& corpus, const ShingleConfig& cfg) {
    NearDupIndex index;
    index.window = cfg.window;
    for (const auto& [guid, item] : corpus.items) {
        if (!item.text) continue;
        std::set<std::string> shingles = shingles_of_text(*item.text, cfg.window);
        if (shingles.empty()) continue;
        index.sizes[guid] = shingles.size();
        auto& refs = index.item_shingles[guid];
        refs.reserve(shingles.size());
        for (const auto& s : shingles) {
            auto [it, inserted] = index.postings.try_emplace(s);
            it->second.push_back(guid);
            refs.push_back(&it->first);
        }
    }
    // corpus.items iterates in ascending guid order, so postings are sorted
    return index;
}

/// All other indexed items with resemblance >= threshold, ascending guid.
/// Items absent from the index (no text / too short) return the empty set.
inline std::set<std::string> query_near(const std::string& guid, const NearDupIndex& index,
                                        double threshold) {
    std::set<std::string> out;
    auto self = index.item_shingles.find(guid);
    if (self == index.item_shingles.end()) return out;
    std::unordered_map<std::string, std::size_t> common;
    for (const std::string* s : self->second) {
        auto post = index.postings.find(*s);
        if (post == index.postings.end()) continue;
        for (const auto& other : post->second)
            if (other != guid) ++common[other];
    }
    std::size_t a = index.sizes.at(guid);
    for (const auto& [other, c] : common) {
        std::size_t b = index.sizes.at(other);
        double r = static_cast<double>(c) / static_cast<double>(a + b - c);
        if (r >= threshold) out.insert(other);
    }
    return out;
}

}  // namespace privfilter
