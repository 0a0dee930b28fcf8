#include "doctest.h"

#include "tagaug/analysis.hpp"
#include "tagaug/toy_grammar.hpp"

#include <sstream>

using namespace tagaug;

namespace {

Corpus tiny(const std::vector<std::vector<std::pair<std::string, std::string>>>& rows) {
    Corpus c;
    c.scheme = TagScheme::IOBES;
    for (const auto& row : rows) {
        TaggedSentence s;
        for (const auto& [w, t] : row) {
            s.tokens.push_back({w, t});
            if (t != "O") c.tagset.insert(t);
        }
        c.sentences.push_back(s);
    }
    return c;
}

} // namespace

TEST_SUITE_BEGIN("analysis");

TEST_CASE("contextualized entities carry one word of context per side") {
    auto c = tiny({
        {{"visit", "O"}, {"Avalon", "S-LOC"}, {"today", "O"}},
        {{"Avalon", "S-LOC"}, {"hosts", "O"}},
        {{"meet", "O"}, {"Kira", "B-PER"}, {"Vance", "E-PER"}},
    });
    auto ce = contextualized_entities(c);
    CHECK(ce == std::set<std::string>{"visit Avalon today", "<S> Avalon hosts",
                                      "meet Kira Vance </S>"});
}

TEST_CASE("entity sets can ignore types") {
    auto c = tiny({
        {{"Avalon", "S-LOC"}},
        {{"Avalon", "S-ORG"}},
        {{"idle", "O"}},
    });
    CHECK(entity_set(c, true) == std::set<std::string>{"Avalon\tLOC", "Avalon\tORG"});
    CHECK(entity_set(c, false) == std::set<std::string>{"Avalon"});
    CHECK(unigram_set(c) == std::set<std::string>{"Avalon", "idle"});
}

TEST_CASE("diversity counts only what gold lacks") {
    auto gold = tiny({
        {{"visit", "O"}, {"Avalon", "S-LOC"}, {"today", "O"}},
        {{"see", "O"}, {"Novatek", "S-ORG"}},
    });
    auto generated = tiny({
        {{"visit", "O"}, {"Avalon", "S-LOC"}, {"today", "O"}},  // old CE
        {{"leave", "O"}, {"Avalon", "S-LOC"}, {"now", "O"}},    // new CE, old entity
        {{"join", "O"}, {"Zephyrion", "S-ORG"}},                // new everything
    });
    auto r = diversity_report(gold, generated);
    CHECK(r.gold_unique_ce == 2);
    CHECK(r.generated_new_ce == 2);
    CHECK(r.ce_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.gold_unique_entities == 2);
    CHECK(r.generated_new_entities == 1);
    // leave, now, join, Zephyrion are unseen words
    CHECK(r.new_unigram_types == 4);
}

TEST_CASE("an empty gold corpus cannot divide by zero") {
    Corpus gold;
    gold.scheme = TagScheme::IOBES;
    TaggedSentence s;
    s.tokens = {{"plain", "O"}};
    gold.sentences.push_back(s);
    auto generated = tiny({{{"Avalon", "S-LOC"}}});
    auto r = diversity_report(gold, generated);
    CHECK(r.gold_unique_ce == 0);
    CHECK(r.generated_new_ce == 1);
    CHECK(r.ce_ratio == 0.0); // guarded division
}

TEST_CASE("type sensitivity widens or narrows novelty") {
    auto gold = tiny({{{"Avalon", "S-LOC"}}});
    auto generated = tiny({{{"Avalon", "S-ORG"}}});
    CHECK(diversity_report(gold, generated, true).generated_new_entities == 1);
    CHECK(diversity_report(gold, generated, false).generated_new_entities == 0);
}

TEST_CASE("diversity reports serialize their counters") {
    auto gold = tiny({{{"Avalon", "S-LOC"}}});
    auto generated = tiny({{{"Westmark", "S-LOC"}}});
    auto r = diversity_report(gold, generated);
    std::ostringstream out;
    write_diversity_report(out, r);
    auto text = out.str();
    for (const char* key :
         {"gold_unique_ce=", "generated_new_ce=", "ce_ratio=", "gold_unique_entities=",
          "generated_new_entities=", "new_unigram_types="})
        CHECK(text.find(key) != std::string::npos);
    CHECK(diversity_report_tsv(r).find('\t') != std::string::npos);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("toygrammar");

TEST_CASE("the demo grammar covers five types with shared surfaces") {
    auto g = demo_grammar();
    REQUIRE(g.lexicons.size() == 5);
    for (const char* type : {"PER", "LOC", "ORG", "DATE", "EVT"})
        CHECK(g.lexicons.count(type) == 1);
    CHECK(g.templates.size() >= 15);

    // LOC and ORG intentionally share some single-token surfaces
    std::set<std::vector<std::string>> loc(g.lexicons["LOC"].begin(), g.lexicons["LOC"].end());
    size_t shared = 0;
    for (const auto& e : g.lexicons["ORG"]) shared += loc.count(e);
    CHECK(shared >= 3);
}

TEST_CASE("sampled corpora are valid IOBES and deterministic") {
    auto g = demo_grammar();
    auto a = gen_toy_corpus(g, 150, 12);
    CHECK(a.scheme == TagScheme::IOBES);
    CHECK(a.sentences.size() == 150);
    for (const auto& s : a.sentences) CHECK(tags_valid(s.tags(), TagScheme::IOBES));
    auto b = gen_toy_corpus(g, 150, 12);
    CHECK(a.sentences == b.sentences);
    auto c = gen_toy_corpus(g, 150, 13);
    CHECK(a.sentences != c.sentences);

    // both multi-token and single-token entities occur
    bool multi = false, single = false;
    for (const auto& s : a.sentences)
        for (const auto& sp : extract_spans(s, a.scheme)) {
            multi = multi || sp.end - sp.start > 1;
            single = single || sp.end - sp.start == 1;
        }
    CHECK(multi);
    CHECK(single);
}

TEST_CASE("splits have pairwise distinct word sequences") {
    auto splits = gen_toy_splits(demo_grammar(), 120, 40, 60, 77);
    CHECK(splits.train.sentences.size() == 120);
    CHECK(splits.dev.sentences.size() == 40);
    CHECK(splits.test.sentences.size() == 60);
    std::set<std::vector<std::string>> seen;
    for (const Corpus* c : {&splits.train, &splits.dev, &splits.test})
        for (const auto& s : c->sentences) CHECK(seen.insert(s.words()).second);
}

TEST_SUITE_END();
