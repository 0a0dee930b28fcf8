#include "doctest.h"

#include "tagaug/clean.hpp"
#include "tagaug/rng.hpp"

#include <sstream>

using namespace tagaug;

namespace {

const std::set<std::string> kTags = {"S-LOC", "S-PER", "B-PER", "E-PER"};

LinearizeConfig tag_word() {
    LinearizeConfig cfg;
    cfg.order = LinearizeOrder::TagWord;
    return cfg;
}

// Two clean sequences plus two per rejection bucket.
std::vector<LinearizedSequence> mixed_fixture() {
    return {
        {"S-LOC", "Baghdad"},                         // kept
        {"B-PER", "Alan", "E-PER", "Turing", "visited"}, // kept
        {"S-LOC"},                                    // malformed: dangling tag
        {"S-LOC", "S-PER", "x"},                      // malformed: two tags in a row
        {"just", "plain", "words"},                   // rule 1: nothing tagged
        {"nothing", "tagged", "here"},                // rule 1
        {"S-LOC", "[unk]"},                           // rule 2: only unknown words
        {"B-PER", "[unk]", "E-PER", "[unk]"},         // rule 2
        {"B-PER", "Alan", "stopped"},                 // rule 3: B- never closed
        {"E-PER", "Turing"},                          // rule 3: E- never opened
        {"S-LOC", "Avalon"},                          // rule 4: conflicting pair
        {"S-PER", "Avalon"},                          // rule 4
    };
}

} // namespace

TEST_SUITE_BEGIN("clean");

TEST_CASE("each rejection rule claims its own bucket") {
    auto [kept, report] = clean(mixed_fixture(), tag_word(), TagScheme::IOBES, kTags);
    CHECK(report.kept == 2);
    CHECK(report.rejected.at("malformed") == 2);
    CHECK(report.rejected.at("rule1") == 2);
    CHECK(report.rejected.at("rule2") == 2);
    CHECK(report.rejected.at("rule3") == 2);
    CHECK(report.rejected.at("rule4") == 2);
    CHECK(report.input_count() == 12);

    REQUIRE(kept.size() == 2);
    CHECK(kept[0].tokens == std::vector<Token>{{"Baghdad", "S-LOC"}});
    CHECK(kept[1].words() ==
          std::vector<std::string>{"Alan", "Turing", "visited"});
}

TEST_CASE("exact duplicates collapse to one copy") {
    std::vector<LinearizedSequence> seqs = {{"S-LOC", "Baghdad"},
                                            {"S-LOC", "Baghdad"},
                                            {"S-LOC", "Baghdad"}};
    auto [kept, report] = clean(seqs, tag_word(), TagScheme::IOBES, kTags);
    CHECK(kept.size() == 1);
    CHECK(report.rejected.at("rule4") == 2);
    CHECK(report.input_count() == 3);
}

TEST_CASE("gold sentences join the conflict grouping") {
    Corpus gold;
    gold.scheme = TagScheme::IOBES;
    gold.tagset = kTags;
    TaggedSentence avalon;
    avalon.tokens = {{"Avalon", "S-LOC"}};
    gold.sentences.push_back(avalon);

    // conflicts with the gold tagging
    auto [kept1, r1] =
        clean({{"S-PER", "Avalon"}}, tag_word(), TagScheme::IOBES, kTags, &gold);
    CHECK(kept1.empty());
    CHECK(r1.rejected.at("rule4") == 1);

    // identical to gold: a duplicate, not new data
    auto [kept2, r2] =
        clean({{"S-LOC", "Avalon"}}, tag_word(), TagScheme::IOBES, kTags, &gold);
    CHECK(kept2.empty());
    CHECK(r2.rejected.at("rule4") == 1);

    // untouched by gold
    auto [kept3, r3] =
        clean({{"S-LOC", "Westmark"}}, tag_word(), TagScheme::IOBES, kTags, &gold);
    CHECK(kept3.size() == 1);
    CHECK(r3.total_rejected() == 0);
}

TEST_CASE("kept sentences preserve input order") {
    std::vector<LinearizedSequence> seqs = {{"S-LOC", "a"}, {"bad"}, {"S-LOC", "b"},
                                            {"S-PER", "c"}};
    seqs[1] = {"oops"}; // rule 1
    auto [kept, report] = clean(seqs, tag_word(), TagScheme::IOBES, kTags);
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].tokens[0].surface == "a");
    CHECK(kept[1].tokens[0].surface == "b");
    CHECK(kept[2].tokens[0].surface == "c");
}

TEST_CASE("token scheme skips rule 1 and checks label membership") {
    std::set<std::string> pos = {"NN", "VB"};
    LinearizeConfig cfg;
    cfg.order = LinearizeOrder::TagWord;
    cfg.drop_o = false;

    std::vector<LinearizedSequence> seqs = {
        {"NN", "dog", "VB", "barks"}, // kept
        {"XX", "dog"},                // malformed: XX reads as a word with no tag
    };
    auto [kept, report] = clean(seqs, cfg, TagScheme::TOKEN, pos);
    CHECK(kept.size() == 1);
    CHECK(report.rejected.at("malformed") == 1);
    CHECK(report.rejected.at("rule1") == 0);

    // with O dropped, untagged words delinearize as O and survive for TOKEN
    auto [kept2, r2] = clean({{"plain", "words"}}, tag_word(), TagScheme::TOKEN, pos);
    CHECK(kept2.size() == 1);
    CHECK(r2.total_rejected() == 0);
}

TEST_CASE("counts always conserve the input size") {
    std::vector<std::string> pool = {"S-LOC", "S-PER", "B-PER", "E-PER", "[unk]",
                                     "[BOS]", "[labeled]", "Avalon", "x", "y"};
    Rng rng(2718);
    std::vector<LinearizedSequence> seqs;
    for (int i = 0; i < 3000; ++i) {
        LinearizedSequence s;
        size_t len = rng.below(6); // empty sequences included on purpose
        for (size_t k = 0; k < len; ++k) s.push_back(pool[size_t(rng.below(pool.size()))]);
        seqs.push_back(s);
    }
    for (bool with_gold : {false, true}) {
        Corpus gold;
        gold.scheme = TagScheme::IOBES;
        gold.tagset = kTags;
        TaggedSentence g;
        g.tokens = {{"Avalon", "S-LOC"}};
        gold.sentences.push_back(g);
        auto [kept, report] = clean(seqs, tag_word(), TagScheme::IOBES, kTags,
                                    with_gold ? &gold : nullptr);
        CHECK(report.kept + report.total_rejected() == seqs.size());
        CHECK(report.kept == kept.size());
        for (const auto& s : kept) {
            bool any_tag = false;
            bool all_unk = true;
            for (const auto& t : s.tokens) {
                any_tag = any_tag || t.tag != "O";
                all_unk = all_unk && t.surface == "[unk]";
            }
            CHECK(any_tag);
            CHECK_FALSE(all_unk);
            CHECK(tags_valid(s.tags(), TagScheme::IOBES));
        }
    }
}

TEST_CASE("reports cap sample lines at five per bucket") {
    std::vector<LinearizedSequence> seqs(9, {"no", "tags"});
    auto [kept, report] = clean(seqs, tag_word(), TagScheme::IOBES, kTags);
    CHECK(report.rejected.at("rule1") == 9);
    CHECK(report.samples.at("rule1").size() == 5);
    CHECK(report.samples.at("rule1")[0] == "no tags");

    std::ostringstream out;
    write_clean_report(out, report);
    auto text = out.str();
    CHECK(text.find("input=9\n") != std::string::npos);
    CHECK(text.find("kept=0\n") != std::string::npos);
    CHECK(text.find("rejected_rule1=9\n") != std::string::npos);
    CHECK(text.find("# rule1: no tags\n") != std::string::npos);
}

TEST_SUITE_END();
