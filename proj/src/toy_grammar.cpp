#include "tagaug/toy_grammar.hpp"

#include <algorithm>
#include <sstream>

namespace tagaug {

namespace {

std::vector<std::string> words_of(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

} // namespace

ToyGrammar demo_grammar() {
    ToyGrammar g;

    const char* first[] = {"Anya", "Boris", "Clara", "Dmitri", "Elena", "Farid", "Greta",
                           "Hugo", "Irene", "Jonas", "Karim", "Lena", "Marco", "Nadia"};
    const char* last[] = {"Albrecht", "Barlow", "Cormack", "Delgado", "Ekstrom", "Farrell",
                          "Grimaldi", "Halloran", "Ibarra", "Jensen", "Kovacs", "Lindqvist",
                          "Moreau", "Navarro"};
    for (const char* f : first)
        for (const char* l : last) g.lexicons["PER"].push_back({f, l});
    for (const char* m : {"Okafor", "Petrov", "Quintana", "Rostova", "Sorenson", "Tanaka"})
        g.lexicons["PER"].push_back({m});

    for (const char* c : {"Avalon", "Meridian", "Caldera", "Westmark", "Brightwater", "Dunmore",
                          "Eastvale", "Fernhill", "Graystone", "Ironbay", "Juniper", "Kestrel",
                          "Larkspur", "Millbrook", "Northgate", "Oakridge", "Pinehurst",
                          "Quillford"})
        g.lexicons["LOC"].push_back({c});
    for (const char* c : {"Port Arvale", "New Calder", "Lake Verity", "Fort Damon"})
        g.lexicons["LOC"].push_back(words_of(c));

    for (const char* o : {"Velorin Labs", "Harbrook Bank", "Quanterra Group", "Ashford Media",
                          "Bellmont Systems", "Crestline Logistics", "Dorado Partners",
                          "Everline Capital", "Foxglove Studios", "Galewind Energy",
                          "Hollis Foundry", "Ivywood Press"})
        g.lexicons["ORG"].push_back(words_of(o));
    // single-word names, four of them shared with LOC on purpose
    for (const char* o : {"Avalon", "Meridian", "Caldera", "Westmark", "Novatek", "Zephyrion"})
        g.lexicons["ORG"].push_back({o});

    for (const char* d : {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday",
                          "Sunday", "January", "February", "March", "April", "June", "July",
                          "August", "September", "October", "November", "December"})
        g.lexicons["DATE"].push_back({d});

    for (const char* e : {"Amber Cup", "Solis Summit", "Harvest Fair", "Crystal Regatta",
                          "Ember Festival", "Meridian Games", "Aurora Expo", "Granite Marathon",
                          "Velvet Gala", "Horizon Forum"})
        g.lexicons["EVT"].push_back(words_of(e));

    for (const char* t : {
             "$PER flew to $LOC on $DATE .",
             "$PER met $PER in $LOC .",
             "$ORG opened an office in $LOC .",
             "$PER joined $ORG on $DATE .",
             "the $EVT begins on $DATE .",
             "$ORG will sponsor the $EVT .",
             "$PER spoke at the $EVT in $LOC .",
             "analysts at $ORG praised $PER .",
             "$LOC hosted the $EVT last year .",
             "$PER returned from $LOC on $DATE .",
             "$ORG hired $PER as chief adviser .",
             "reporters followed $PER through $LOC .",
             "the mayor of $LOC thanked $ORG .",
             "$PER signed with $ORG in $LOC .",
             "on $DATE the $EVT drew huge crowds .",
             "$ORG moved its headquarters to $LOC .",
             "$PER wrote about the $EVT on $DATE .",
             "trading closed early on $DATE .",
             "the council met again yesterday .",
         })
        g.templates.push_back(words_of(t));
    return g;
}

namespace {

TaggedSentence sample_sentence(const ToyGrammar& g, Rng& rng) {
    const auto& tpl = g.templates[size_t(rng.below(g.templates.size()))];
    TaggedSentence s;
    for (const auto& tok : tpl) {
        if (tok.size() > 1 && tok[0] == '$') {
            std::string type = tok.substr(1);
            auto it = g.lexicons.find(type);
            if (it == g.lexicons.end() || it->second.empty())
                throw DomainError("grammar has no lexicon for type " + type);
            const auto& surface = it->second[size_t(rng.below(it->second.size()))];
            if (surface.size() == 1) {
                s.tokens.push_back({surface[0], "S-" + type});
            } else {
                s.tokens.push_back({surface[0], "B-" + type});
                for (size_t i = 1; i + 1 < surface.size(); ++i)
                    s.tokens.push_back({surface[i], "I-" + type});
                s.tokens.push_back({surface.back(), "E-" + type});
            }
        } else {
            s.tokens.push_back({tok, "O"});
        }
    }
    return s;
}

void fill_tagset(Corpus& c) {
    for (const auto& s : c.sentences)
        for (const auto& t : s.tokens)
            if (t.tag != "O") c.tagset.insert(t.tag);
}

} // namespace

Corpus gen_toy_corpus(const ToyGrammar& g, size_t n, uint64_t seed) {
    if (g.templates.empty()) throw DomainError("grammar has no templates");
    if (n == 0) throw DomainError("cannot generate an empty corpus");
    Corpus c;
    c.scheme = TagScheme::IOBES;
    Rng rng(seed);
    c.sentences.reserve(n);
    for (size_t i = 0; i < n; ++i) c.sentences.push_back(sample_sentence(g, rng));
    fill_tagset(c);
    return c;
}

ToySplits gen_toy_splits(const ToyGrammar& g, size_t n_train, size_t n_dev, size_t n_test,
                         uint64_t seed) {
    if (g.templates.empty()) throw DomainError("grammar has no templates");
    size_t want = n_train + n_dev + n_test;
    Rng rng(seed);
    std::set<std::vector<std::string>> seen;
    std::vector<TaggedSentence> pool;
    size_t attempts = 0, max_attempts = 200 * want + 1000;
    while (pool.size() < want) {
        if (++attempts > max_attempts)
            throw DomainError("grammar too small for disjoint splits of this size");
        auto s = sample_sentence(g, rng);
        if (seen.insert(s.words()).second) pool.push_back(std::move(s));
    }
    ToySplits sp;
    sp.train.scheme = sp.dev.scheme = sp.test.scheme = TagScheme::IOBES;
    for (size_t i = 0; i < n_train; ++i) sp.train.sentences.push_back(pool[i]);
    for (size_t i = 0; i < n_dev; ++i) sp.dev.sentences.push_back(pool[n_train + i]);
    for (size_t i = 0; i < n_test; ++i) sp.test.sentences.push_back(pool[n_train + n_dev + i]);
    fill_tagset(sp.train);
    fill_tagset(sp.dev);
    fill_tagset(sp.test);
    return sp;
}

} // namespace tagaug
