#include "tagaug/annotate.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace tagaug {

void KnowledgeBase::add(const std::vector<std::string>& surface, const std::string& type) {
    if (surface.empty()) throw DomainError("empty KB surface");
    if (type.empty()) throw DomainError("empty KB type");
    entries_[surface] = type;
    max_len_ = std::max(max_len_, surface.size());
}

const std::string* KnowledgeBase::lookup(const std::vector<std::string>& surface) const {
    auto it = entries_.find(surface);
    return it == entries_.end() ? nullptr : &it->second;
}

namespace {

// Shared conflict resolution: per surface, the most frequent type wins,
// ties break toward the smaller type name.
KnowledgeBase resolve(const std::map<std::vector<std::string>, std::map<std::string, size_t>>& counts,
                      size_t min_freq) {
    KnowledgeBase kb;
    for (const auto& [surface, per_type] : counts) {
        size_t total = 0;
        for (const auto& [type, n] : per_type) total += n;
        if (total < min_freq) continue;
        std::string best;
        size_t best_n = 0;
        for (const auto& [type, n] : per_type) { // map order = lexicographic, ties keep first
            if (n > best_n) {
                best = type;
                best_n = n;
            }
        }
        kb.add(surface, best);
    }
    return kb;
}

} // namespace

KnowledgeBase build_kb(const Corpus& corpus, int min_freq) {
    if (min_freq < 1) throw DomainError("min_freq must be >= 1");
    if (corpus.scheme == TagScheme::TOKEN)
        throw DomainError("TOKEN corpora carry no entity spans");
    std::map<std::vector<std::string>, std::map<std::string, size_t>> counts;
    for (const auto& s : corpus.sentences) {
        auto words = s.words();
        for (const auto& sp : extract_spans(s, corpus.scheme)) {
            std::vector<std::string> surface(words.begin() + long(sp.start),
                                             words.begin() + long(sp.end));
            ++counts[surface][sp.type];
        }
    }
    return resolve(counts, size_t(min_freq));
}

TaggedSentence kb_annotate(const std::vector<std::string>& words, const KnowledgeBase& kb) {
    if (words.empty()) throw DomainError("cannot annotate an empty sentence");
    TaggedSentence out;
    out.tokens.reserve(words.size());
    size_t i = 0;
    std::vector<std::string> probe;
    while (i < words.size()) {
        size_t longest = std::min(kb.max_surface_len(), words.size() - i);
        const std::string* type = nullptr;
        size_t len = 0;
        for (size_t l = longest; l >= 1 && !type; --l) {
            probe.assign(words.begin() + long(i), words.begin() + long(i + l));
            type = kb.lookup(probe);
            if (type) len = l;
        }
        if (!type) {
            out.tokens.push_back({words[i], "O"});
            ++i;
            continue;
        }
        if (len == 1) {
            out.tokens.push_back({words[i], "S-" + *type});
        } else {
            out.tokens.push_back({words[i], "B-" + *type});
            for (size_t k = 1; k + 1 < len; ++k)
                out.tokens.push_back({words[i + k], "I-" + *type});
            out.tokens.push_back({words[i + len - 1], "E-" + *type});
        }
        i += len;
    }
    return out;
}

Corpus kb_annotate_corpus(const std::vector<std::vector<std::string>>& sentences,
                          const KnowledgeBase& kb) {
    Corpus out;
    out.scheme = TagScheme::IOBES;
    for (const auto& words : sentences) {
        auto s = kb_annotate(words, kb);
        for (const auto& t : s.tokens)
            if (t.tag != "O") out.tagset.insert(t.tag);
        out.sentences.push_back(std::move(s));
    }
    return out;
}

Corpus weak_tag(const std::vector<std::vector<std::string>>& sentences, const TaggerModel& tagger) {
    return tag_corpus(tagger, sentences);
}

void write_kb_tsv(std::ostream& out, const KnowledgeBase& kb) {
    for (const auto& [surface, type] : kb.entries()) {
        for (size_t i = 0; i < surface.size(); ++i) {
            if (i) out << ' ';
            out << surface[i];
        }
        out << '\t' << type << '\n';
    }
}

KnowledgeBase read_kb_tsv(std::istream& in) {
    std::map<std::vector<std::string>, std::map<std::string, size_t>> counts;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw ParseError("KB line " + std::to_string(lineno) + ": expected surface<TAB>type");
        std::string surface_part = line.substr(0, tab);
        std::string type = line.substr(tab + 1);
        std::vector<std::string> surface;
        size_t i = 0;
        while (i < surface_part.size()) {
            while (i < surface_part.size() && surface_part[i] == ' ') ++i;
            size_t j = i;
            while (j < surface_part.size() && surface_part[j] != ' ') ++j;
            if (j > i) surface.push_back(surface_part.substr(i, j - i));
            i = j;
        }
        if (surface.empty()) throw ParseError("KB line " + std::to_string(lineno) + ": empty surface");
        ++counts[surface][type];
    }
    return resolve(counts, 1);
}

} // namespace tagaug
