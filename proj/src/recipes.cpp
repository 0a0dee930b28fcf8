#include "tagaug/recipes.hpp"

#include <algorithm>

namespace tagaug {

Corpus subsample(const Corpus& corpus, size_t n, uint64_t seed) {
    if (n > corpus.sentences.size())
        throw DomainError("cannot sample " + std::to_string(n) + " of " +
                          std::to_string(corpus.sentences.size()) + " sentences");
    std::vector<size_t> order(corpus.sentences.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    Corpus out;
    out.scheme = corpus.scheme;
    out.sentences.reserve(n);
    for (size_t i = 0; i < n; ++i) out.sentences.push_back(corpus.sentences[order[i]]);
    for (const auto& s : out.sentences)
        for (const auto& t : s.tokens)
            if (t.tag != "O") out.tagset.insert(t.tag);
    return out;
}

namespace {

// Rebuilds a sentence from kept token indices. For span schemes the
// surviving part of each span is re-tagged from its contiguous fragments.
TaggedSentence rebuild(const TaggedSentence& s, const std::vector<bool>& keep, TagScheme scheme) {
    TaggedSentence out;
    if (scheme == TagScheme::TOKEN) {
        for (size_t i = 0; i < s.tokens.size(); ++i)
            if (keep[i]) out.tokens.push_back(s.tokens[i]);
        return out;
    }
    auto spans = extract_spans(s, scheme);
    std::vector<size_t> new_index(s.tokens.size(), size_t(-1));
    size_t n = 0;
    for (size_t i = 0; i < s.tokens.size(); ++i)
        if (keep[i]) new_index[i] = n++;
    if (n == 0) return out;
    std::vector<Span> new_spans;
    for (const auto& sp : spans) {
        // contiguous kept runs inside the original span become spans
        size_t run_start = size_t(-1);
        for (size_t i = sp.start; i <= sp.end; ++i) {
            bool kept_here = i < sp.end && keep[i];
            if (kept_here && run_start == size_t(-1)) run_start = i;
            if (!kept_here && run_start != size_t(-1)) {
                new_spans.push_back({sp.type, new_index[run_start], new_index[i - 1] + 1});
                run_start = size_t(-1);
            }
        }
    }
    auto tags = scheme == TagScheme::IOBES
                    ? spans_to_iobes(new_spans, n)
                    : std::vector<std::string>();
    if (scheme == TagScheme::BIO) {
        tags.assign(n, "O");
        for (const auto& sp : new_spans) {
            tags[sp.start] = "B-" + sp.type;
            for (size_t i = sp.start + 1; i < sp.end; ++i) tags[i] = "I-" + sp.type;
        }
    }
    for (size_t i = 0; i < s.tokens.size(); ++i)
        if (keep[i]) out.tokens.push_back({s.tokens[i].surface, tags[new_index[i]]});
    return out;
}

} // namespace

Corpus random_deletion(const Corpus& corpus, double p, bool entity_aware, uint64_t seed) {
    if (p < 0 || p > 1) throw DomainError("deletion probability must be in [0, 1]");
    Rng rng(seed);
    Corpus out;
    out.scheme = corpus.scheme;
    for (const auto& s : corpus.sentences) {
        size_t n = s.tokens.size();
        std::vector<bool> keep(n, true);
        std::vector<bool> hit(n, false);
        for (size_t i = 0; i < n; ++i) hit[i] = rng.bernoulli(p);
        if (entity_aware && corpus.scheme != TagScheme::TOKEN) {
            auto spans = extract_spans(s, corpus.scheme);
            std::vector<bool> in_span(n, false);
            for (const auto& sp : spans) {
                bool span_hit = false;
                for (size_t i = sp.start; i < sp.end; ++i) {
                    in_span[i] = true;
                    span_hit = span_hit || hit[i];
                }
                if (span_hit)
                    for (size_t i = sp.start; i < sp.end; ++i) keep[i] = false;
            }
            for (size_t i = 0; i < n; ++i)
                if (!in_span[i] && hit[i]) keep[i] = false;
        } else {
            for (size_t i = 0; i < n; ++i)
                if (hit[i]) keep[i] = false;
        }
        auto rebuilt = rebuild(s, keep, corpus.scheme);
        if (!rebuilt.tokens.empty()) out.sentences.push_back(std::move(rebuilt));
    }
    for (const auto& s : out.sentences)
        for (const auto& t : s.tokens)
            if (t.tag != "O") out.tagset.insert(t.tag);
    return out;
}

Corpus deletion_passes(const Corpus& gold, double p, bool entity_aware, uint64_t seed,
                       size_t target) {
    if (gold.sentences.empty()) throw DomainError("no gold sentences");
    Corpus out;
    out.scheme = gold.scheme;
    // deletion can empty out whole passes at extreme p; bail out rather
    // than spin forever
    size_t max_passes = 4 * (target / std::max<size_t>(1, gold.sentences.size()) + 2);
    for (size_t pass = 0; out.sentences.size() < target && pass < max_passes; ++pass) {
        Corpus one = random_deletion(gold, p, entity_aware, derive_seed(seed, "pass" + std::to_string(pass)));
        for (auto& s : one.sentences) {
            if (out.sentences.size() >= target) break;
            out.sentences.push_back(std::move(s));
        }
    }
    if (out.sentences.size() < target)
        throw DomainError("deletion passes could not reach the requested volume");
    for (const auto& s : out.sentences)
        for (const auto& t : s.tokens)
            if (t.tag != "O") out.tagset.insert(t.tag);
    return out;
}

std::string recipe_name(Recipe r) {
    switch (r) {
        case Recipe::Gold: return "gold";
        case Recipe::Gen: return "gen";
        case Recipe::Rd: return "rd";
        case Recipe::RdStar: return "rd_star";
        case Recipe::Wt: return "wt";
        case Recipe::Kb: return "kb";
        case Recipe::GenUd: return "gen_ud";
        case Recipe::GenKb: return "gen_kb";
    }
    return "?";
}

Recipe recipe_from_name(const std::string& name) {
    for (Recipe r : {Recipe::Gold, Recipe::Gen, Recipe::Rd, Recipe::RdStar, Recipe::Wt,
                     Recipe::Kb, Recipe::GenUd, Recipe::GenKb})
        if (recipe_name(r) == name) return r;
    throw DomainError("unknown recipe: " + name);
}

Corpus assemble_training_set(const Corpus& gold, const Corpus& synthetic,
                             const AssemblePlan& plan) {
    if (gold.sentences.empty()) throw DomainError("no gold sentences");
    if (plan.recipe == Recipe::Gold) return gold;
    if (synthetic.sentences.empty())
        throw DomainError("recipe " + recipe_name(plan.recipe) + " needs synthetic data");
    if (plan.gold_oversample < 1) throw DomainError("gold_oversample must be >= 1");

    Corpus out;
    out.scheme = gold.scheme;
    size_t gold_copies = plan.recipe == Recipe::RdStar ? 1 : size_t(plan.gold_oversample);
    for (size_t c = 0; c < gold_copies; ++c)
        for (const auto& s : gold.sentences) out.sentences.push_back(s);

    size_t syn_count = synthetic.sentences.size();
    if (plan.recipe == Recipe::RdStar) {
        syn_count = gold.sentences.size(); // strict 1:1, tiled when short
    } else if (plan.recipe == Recipe::GenUd || plan.recipe == Recipe::GenKb) {
        syn_count = std::min(syn_count, plan.synthetic_cap);
    }
    for (size_t i = 0; i < syn_count; ++i)
        out.sentences.push_back(synthetic.sentences[i % synthetic.sentences.size()]);

    Rng rng(plan.seed);
    rng.shuffle(out.sentences);
    for (const auto& s : out.sentences)
        for (const auto& t : s.tokens)
            if (t.tag != "O") out.tagset.insert(t.tag);
    return out;
}

namespace {

// `count` sequences drawn by tiling: full reshuffled copies, remainder cut.
std::vector<LinearizedSequence> tile(const std::vector<LinearizedSequence>& src, size_t count,
                                     Rng& rng) {
    std::vector<LinearizedSequence> out;
    out.reserve(count);
    std::vector<size_t> order(src.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    while (out.size() < count) {
        rng.shuffle(order);
        for (size_t i : order) {
            if (out.size() >= count) break;
            out.push_back(src[i]);
        }
    }
    return out;
}

LinearizedSequence with_condition(const LinearizedSequence& seq, const std::string& cond) {
    LinearizedSequence out;
    out.reserve(seq.size() + 1);
    out.push_back(cond);
    size_t from = !seq.empty() && is_condition_token(seq[0]) ? 1 : 0; // replace, not stack
    out.insert(out.end(), seq.begin() + long(from), seq.end());
    return out;
}

} // namespace

std::vector<LinearizedSequence> mix_for_lm(const std::vector<LinearizedSequence>& gold,
                                           const std::vector<LinearizedSequence>& aux,
                                           const std::string& gold_condition,
                                           const std::string& aux_condition,
                                           bool equalize, uint64_t seed) {
    if (gold.empty() || aux.empty()) throw DomainError("both mix sources must be non-empty");
    if (!is_condition_token(gold_condition) || !is_condition_token(aux_condition))
        throw DomainError("mix conditions must be condition tokens");
    if (gold_condition == aux_condition)
        throw DomainError("mix sources need distinct condition tokens");
    Rng rng(seed);
    std::vector<LinearizedSequence> g = gold, a = aux;
    if (equalize) {
        if (g.size() < a.size()) g = tile(g, a.size(), rng);
        else if (a.size() < g.size()) a = tile(a, g.size(), rng);
    }
    std::vector<LinearizedSequence> out;
    out.reserve(g.size() + a.size());
    for (const auto& s : g) out.push_back(with_condition(s, gold_condition));
    for (const auto& s : a) out.push_back(with_condition(s, aux_condition));
    rng.shuffle(out);
    return out;
}

} // namespace tagaug
