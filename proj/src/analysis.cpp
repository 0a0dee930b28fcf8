#include "tagaug/analysis.hpp"

#include <ostream>
#include <sstream>

namespace tagaug {

std::set<std::string> contextualized_entities(const Corpus& c) {
    std::set<std::string> out;
    for (const auto& s : c.sentences) {
        auto words = s.words();
        for (const auto& sp : extract_spans(s, c.scheme)) {
            std::string ce = sp.start == 0 ? "<S>" : words[sp.start - 1];
            for (size_t i = sp.start; i < sp.end; ++i) ce += " " + words[i];
            ce += " " + (sp.end == words.size() ? std::string("</S>") : words[sp.end]);
            out.insert(std::move(ce));
        }
    }
    return out;
}

std::set<std::string> entity_set(const Corpus& c, bool type_sensitive) {
    std::set<std::string> out;
    for (const auto& s : c.sentences) {
        auto words = s.words();
        for (const auto& sp : extract_spans(s, c.scheme)) {
            std::string surface;
            for (size_t i = sp.start; i < sp.end; ++i) {
                if (i > sp.start) surface += ' ';
                surface += words[i];
            }
            out.insert(type_sensitive ? surface + "\t" + sp.type : surface);
        }
    }
    return out;
}

std::set<std::string> unigram_set(const Corpus& c) {
    std::set<std::string> out;
    for (const auto& s : c.sentences)
        for (const auto& t : s.tokens) out.insert(t.surface);
    return out;
}

DiversityReport diversity_report(const Corpus& gold, const Corpus& generated,
                                 bool type_sensitive) {
    DiversityReport r;
    auto gold_ce = contextualized_entities(gold);
    auto gen_ce = contextualized_entities(generated);
    r.gold_unique_ce = gold_ce.size();
    for (const auto& ce : gen_ce)
        if (!gold_ce.count(ce)) ++r.generated_new_ce;
    r.ce_ratio = r.gold_unique_ce ? double(r.generated_new_ce) / double(r.gold_unique_ce) : 0.0;

    auto gold_ents = entity_set(gold, type_sensitive);
    auto gen_ents = entity_set(generated, type_sensitive);
    r.gold_unique_entities = gold_ents.size();
    for (const auto& e : gen_ents)
        if (!gold_ents.count(e)) ++r.generated_new_entities;

    auto gold_uni = unigram_set(gold);
    for (const auto& w : unigram_set(generated))
        if (!gold_uni.count(w)) ++r.new_unigram_types;
    return r;
}

void write_diversity_report(std::ostream& out, const DiversityReport& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.ce_ratio);
    out << "gold_unique_ce=" << r.gold_unique_ce << '\n'
        << "generated_new_ce=" << r.generated_new_ce << '\n'
        << "ce_ratio=" << buf << '\n'
        << "gold_unique_entities=" << r.gold_unique_entities << '\n'
        << "generated_new_entities=" << r.generated_new_entities << '\n'
        << "new_unigram_types=" << r.new_unigram_types << '\n';
}

std::string diversity_report_tsv(const DiversityReport& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.ce_ratio);
    std::ostringstream o;
    o << r.gold_unique_ce << '\t' << r.generated_new_ce << '\t' << buf << '\t'
      << r.gold_unique_entities << '\t' << r.generated_new_entities << '\t' << r.new_unigram_types;
    return o.str();
}

} // namespace tagaug
