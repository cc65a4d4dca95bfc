#pragma once

// Seed-driven privileged-set computation. Starting from an address match
// (or an explicit selection) the engine runs a fixed-point expansion over
// MD5 duplicates, near-duplicates and chained duplicates — but only on the
// FROM-derived branch. TO-side families are flagged yet never expanded,
// so content similarity to material merely *sent to* the privileged
// address cannot drag in third-party items.

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "privfilter/ingest.hpp"
#include "privfilter/shingle.hpp"

namespace privfilter {

struct FilterConfig {
    double threshold = 0.9;
    bool apply_changes = false;
    std::string export_dir;
    std::string custodian_name;
    int workers = 1;
    std::optional<unsigned> shuffle_seed;  // testing: randomize queue order
};

struct SeedSets {
    std::set<std::string> from_items;  // FROM matches plus descendants
    std::set<std::string> to_items;    // TO matches plus descendants
};

struct RelationFindings {
    std::set<std::string> duplicates;         // MD5-equal, excluding self
    std::set<std::string> near_duplicates;    // resemblance >= threshold
    std::set<std::string> chained_duplicates; // transitive near-dup closure
};

enum class Reason {
    seed_from,
    seed_to,
    address_family,
    md5_duplicate,
    near_duplicate,
    chained_duplicate,
    family_of_flagged,
};

inline std::string_view reason_name(Reason r) {
    switch (r) {
        case Reason::seed_from: return "seed_from";
        case Reason::seed_to: return "seed_to";
        case Reason::address_family: return "address_family";
        case Reason::md5_duplicate: return "md5_duplicate";
        case Reason::near_duplicate: return "near_duplicate";
        case Reason::chained_duplicate: return "chained_duplicate";
        case Reason::family_of_flagged: return "family_of_flagged";
    }
    return "unknown";
}

struct FilterResult {
    std::set<std::string> privileged;
    std::map<std::string, Reason> provenance;  // first-discovery reason
    std::map<std::string, std::size_t> count_by_reason;
    std::map<std::string, std::size_t> count_by_kind;

    std::size_t unique_md5_count(const CorpusSnapshot& corpus) const {
        std::set<std::string> md5s;
        for (const auto& g : privileged) md5s.insert(corpus.at(g).md5);
        return md5s.size();
    }
};

/// E-mails whose From (resp. To) contains the address, with descendants.
/// CC and BCC are never consulted.
inline SeedSets seed_from_address(const std::string& addr, const CorpusSnapshot& corpus) {
    SeedSets seeds;
    std::string norm = normalize_address(addr);
    for (const auto& [guid, item] : corpus.items) {
        if (!item.email) continue;
        const auto& m = *item.email;
        bool in_from = std::find(m.from_addresses.begin(), m.from_addresses.end(), norm) !=
                       m.from_addresses.end();
        bool in_to =
            std::find(m.to_addresses.begin(), m.to_addresses.end(), norm) != m.to_addresses.end();
        if (in_from) {
            seeds.from_items.insert(guid);
            for (const auto& d : corpus.descendants(guid)) seeds.from_items.insert(d);
        }
        if (in_to) {
            seeds.to_items.insert(guid);
            for (const auto& d : corpus.descendants(guid)) seeds.to_items.insert(d);
        }
    }
    return seeds;
}

/// Shared lookup state for expansions over one corpus + index.
struct RelationContext {
    const CorpusSnapshot& corpus;
    const NearDupIndex& index;
    double threshold;
    std::map<std::string, std::vector<std::string>> by_md5;

    RelationContext(const CorpusSnapshot& c, const NearDupIndex& i, double t)
        : corpus(c), index(i), threshold(t) {
        for (const auto& [guid, item] : corpus.items) by_md5[item.md5].push_back(guid);
    }
};

/// Duplicates, near-duplicates and the chained-duplicate closure for one
/// item. Pure: results do not depend on what has been flagged so far.
inline RelationFindings expand_item(const std::string& guid, const RelationContext& ctx) {
    RelationFindings f;
    const EvidenceItem& item = ctx.corpus.at(guid);
    auto md5_group = ctx.by_md5.find(item.md5);
    if (md5_group != ctx.by_md5.end())
        for (const auto& g : md5_group->second)
            if (g != guid) f.duplicates.insert(g);

    f.near_duplicates = query_near(guid, ctx.index, ctx.threshold);

    // chained: breadth-first closure of the near-duplicate relation
    std::vector<std::string> frontier(f.near_duplicates.begin(), f.near_duplicates.end());
    f.chained_duplicates = f.near_duplicates;
    while (!frontier.empty()) {
        std::vector<std::string> next;
        for (const auto& g : frontier) {
            for (const auto& n : query_near(g, ctx.index, ctx.threshold)) {
                if (n == guid || f.chained_duplicates.count(n)) continue;
                f.chained_duplicates.insert(n);
                next.push_back(n);
            }
        }
        frontier = std::move(next);
    }
    return f;
}

inline RelationFindings expand_item(const std::string& guid, const NearDupIndex& index,
                                    const CorpusSnapshot& corpus, double threshold) {
    RelationContext ctx(corpus, index, threshold);
    return expand_item(guid, ctx);
}

/// Fig.-style progress line; deliberately free of names, subjects or text.
using FilterLogSink = std::function<void(const std::string&)>;

namespace relation_detail {

struct Flagger {
    const CorpusSnapshot& corpus;
    FilterResult& result;

    /// Flag with a first-discovery reason; returns true when newly flagged.
    bool flag(const std::string& guid, Reason reason) {
        auto [it, inserted] = result.provenance.emplace(guid, reason);
        if (!inserted) return false;
        result.privileged.insert(guid);
        ++result.count_by_reason[std::string(reason_name(reason))];
        ++result.count_by_kind[std::string(kind_name(corpus.at(guid).kind))];
        return true;
    }
};

}  // namespace relation_detail

/// Queue-driven privileged-set closure. `queue_seed` items are expanded;
/// `flag_only` items (the TO side) are marked privileged without feeding
/// the expansion. The result is independent of queue order and worker
/// count; the log reflects the dequeue sequence.
inline FilterResult run_filter_queue(const std::vector<std::string>& queue_seed,
                                     const std::vector<std::string>& flag_only,
                                     const std::map<std::string, Reason>& seed_reasons,
                                     const RelationContext& ctx, const FilterConfig& cfg,
                                     const FilterLogSink& log = {}) {
    FilterResult result;
    relation_detail::Flagger flagger{ctx.corpus, result};

    for (const auto& g : flag_only)
        flagger.flag(g, seed_reasons.count(g) ? seed_reasons.at(g) : Reason::seed_to);

    std::vector<std::string> queue = queue_seed;
    if (cfg.shuffle_seed) {
        std::mt19937 rng(*cfg.shuffle_seed);
        std::shuffle(queue.begin(), queue.end(), rng);
    }
    for (const auto& g : queue)
        flagger.flag(g, seed_reasons.count(g) ? seed_reasons.at(g) : Reason::seed_from);

    const int workers = std::max(1, cfg.workers);
    std::size_t next = 0;
    while (next < queue.size()) {
        // expand the current wave in parallel; expansions are pure
        std::size_t wave_end = queue.size();
        std::vector<RelationFindings> findings(wave_end - next);
        if (workers == 1 || wave_end - next == 1) {
            for (std::size_t i = next; i < wave_end; ++i)
                findings[i - next] = expand_item(queue[i], ctx);
        } else {
            std::atomic<std::size_t> cursor{next};
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t i = cursor.fetch_add(1); i < wave_end;
                         i = cursor.fetch_add(1))
                        findings[i - next] = expand_item(queue[i], ctx);
                });
            }
            for (auto& t : pool) t.join();
        }
        // merge sequentially in dequeue order
        for (std::size_t i = next; i < wave_end; ++i) {
            const std::string& current = queue[i];
            const RelationFindings& f = findings[i - next];
            if (log) {
                log("Searching relations for item " + std::to_string(i) + " (" +
                    std::string(kind_name(ctx.corpus.at(current).kind)) + ") of " +
                    std::to_string(queue.size()) + ". | found " +
                    std::to_string(f.duplicates.size()) + " duplicate, " +
                    std::to_string(f.near_duplicates.size()) + " nearDuplicate, " +
                    std::to_string(f.chained_duplicates.size()) + " chainedDuplicate for this item");
            }
            std::vector<std::pair<std::string, Reason>> newly;
            auto discover = [&](const std::set<std::string>& group, Reason reason) {
                for (const auto& g : group)
                    if (!result.privileged.count(g)) newly.emplace_back(g, reason);
            };
            discover(f.duplicates, Reason::md5_duplicate);
            discover(f.near_duplicates, Reason::near_duplicate);
            discover(f.chained_duplicates, Reason::chained_duplicate);
            std::vector<std::string> enqueue;
            for (const auto& [g, reason] : newly) {
                if (!flagger.flag(g, reason)) continue;
                enqueue.push_back(g);
                for (const auto& d : ctx.corpus.descendants(g))
                    if (flagger.flag(d, Reason::family_of_flagged)) enqueue.push_back(d);
            }
            if (cfg.shuffle_seed) {
                std::mt19937 rng(*cfg.shuffle_seed + static_cast<unsigned>(i) + 1);
                std::shuffle(enqueue.begin(), enqueue.end(), rng);
            }
            for (auto& g : enqueue) queue.push_back(std::move(g));
        }
        next = wave_end;
    }
    return result;
}

/// Address-seeded filter run (the workflow's scenario 2).
inline FilterResult run_filter(const SeedSets& seeds, const CorpusSnapshot& corpus,
                               const NearDupIndex& index, const FilterConfig& cfg,
                               const FilterLogSink& log = {}) {
    RelationContext ctx(corpus, index, cfg.threshold);
    std::map<std::string, Reason> reasons;
    for (const auto& g : seeds.from_items)
        reasons[g] = corpus.at(g).parent.empty() || !seeds.from_items.count(corpus.at(g).parent)
                         ? Reason::seed_from
                         : Reason::address_family;
    for (const auto& g : seeds.to_items)
        if (!reasons.count(g))
            reasons[g] = corpus.at(g).parent.empty() || !seeds.to_items.count(corpus.at(g).parent)
                             ? Reason::seed_to
                             : Reason::address_family;
    std::vector<std::string> queue(seeds.from_items.begin(), seeds.from_items.end());
    std::vector<std::string> flag_only;
    for (const auto& g : seeds.to_items)
        if (!seeds.from_items.count(g)) flag_only.push_back(g);
    return run_filter_queue(queue, flag_only, reasons, ctx, cfg, log);
}

/// Explicit-selection filter run (scenario 1): the selected items and
/// their descendants seed the queue exactly like FROM-side items.
inline FilterResult run_filter(const std::vector<std::string>& selection,
                               const CorpusSnapshot& corpus, const NearDupIndex& index,
                               const FilterConfig& cfg, const FilterLogSink& log = {}) {
    RelationContext ctx(corpus, index, cfg.threshold);
    std::set<std::string> queue_set;
    std::map<std::string, Reason> reasons;
    for (const auto& g : selection) {
        corpus.at(g);  // throws on unknown guid
        if (queue_set.insert(g).second) reasons.emplace(g, Reason::seed_from);
        for (const auto& d : corpus.descendants(g))
            if (queue_set.insert(d).second) reasons.emplace(d, Reason::address_family);
    }
    std::vector<std::string> queue(queue_set.begin(), queue_set.end());
    return run_filter_queue(queue, {}, reasons, ctx, cfg, log);
}

/// Address match plus descendants only — the plain metadata search a GUI
/// filter would run, with no hash or content expansion.
inline std::set<std::string> baseline_metadata(const std::string& addr,
                                               const CorpusSnapshot& corpus) {
    SeedSets seeds = seed_from_address(addr, corpus);
    std::set<std::string> out = seeds.from_items;
    out.insert(seeds.to_items.begin(), seeds.to_items.end());
    return out;
}

/// E-mail items only, From or To match; descendants excluded.
inline std::set<std::string> baseline_email_only(const std::string& addr,
                                                 const CorpusSnapshot& corpus) {
    std::set<std::string> out;
    std::string norm = normalize_address(addr);
    for (const auto& [guid, item] : corpus.items) {
        if (!item.email) continue;
        const auto& m = *item.email;
        if (std::find(m.from_addresses.begin(), m.from_addresses.end(), norm) !=
                m.from_addresses.end() ||
            std::find(m.to_addresses.begin(), m.to_addresses.end(), norm) != m.to_addresses.end())
            out.insert(guid);
    }
    return out;
}

/// Conjunctive token-boundary search over item text. Results are for human
/// review only; nothing here feeds the privilege flagging automatically.
inline std::set<std::string> keyword_search(const std::vector<std::string>& terms,
                                            const CorpusSnapshot& corpus,
                                            const std::set<std::string>& excluded = {}) {
    std::set<std::string> out;
    std::vector<std::vector<std::string>> term_tokens;
    for (const auto& t : terms) {
        auto toks = tokenize(t);
        if (!toks.empty()) term_tokens.push_back(std::move(toks));
    }
    if (term_tokens.empty()) return out;
    for (const auto& [guid, item] : corpus.items) {
        if (!item.text || excluded.count(guid)) continue;
        std::vector<std::string> toks = tokenize(*item.text);
        bool all = true;
        for (const auto& needle : term_tokens) {
            bool found = false;
            if (needle.size() <= toks.size()) {
                for (std::size_t i = 0; i + needle.size() <= toks.size() && !found; ++i) {
                    bool match = true;
                    for (std::size_t k = 0; k < needle.size() && match; ++k)
                        if (toks[i + k] != needle[k]) match = false;
                    found = match;
                }
            }
            if (!found) {
                all = false;
                break;
            }
        }
        if (all) out.insert(guid);
    }
    return out;
}

}  // namespace privfilter
