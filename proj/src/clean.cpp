#include "tagaug/clean.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace tagaug {

size_t CleanReport::total_rejected() const {
    size_t n = 0;
    for (const auto& [rule, count] : rejected) n += count;
    return n;
}

namespace {

std::string join(const std::vector<std::string>& toks) {
    std::string s;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) s += ' ';
        s += toks[i];
    }
    return s;
}

constexpr size_t kMaxSamples = 5;

} // namespace

std::pair<std::vector<TaggedSentence>, CleanReport>
clean(const std::vector<LinearizedSequence>& sequences, const LinearizeConfig& cfg,
      TagScheme scheme, const std::set<std::string>& tagset, const Corpus* gold) {
    CleanReport report;
    for (const char* rule : {"malformed", "rule1", "rule2", "rule3", "rule4"})
        report.rejected[rule] = 0;
    auto reject = [&](const char* rule, const LinearizedSequence& seq) {
        ++report.rejected[rule];
        auto& bucket = report.samples[rule];
        if (bucket.size() < kMaxSamples) bucket.push_back(join(seq));
    };

    // rules 1-3 are independent per sequence; rule 4 needs the survivors
    struct Survivor {
        TaggedSentence sentence;
        LinearizedSequence raw;
    };
    std::vector<Survivor> survivors;
    for (const auto& seq : sequences) {
        auto r = try_delinearize(seq, cfg, tagset);
        if (r.status != DelinearizeStatus::Ok) {
            reject("malformed", seq);
            continue;
        }
        const auto& sent = r.sentence;
        if (scheme != TagScheme::TOKEN) {
            bool any_tag = std::any_of(sent.tokens.begin(), sent.tokens.end(),
                                       [](const Token& t) { return t.tag != "O"; });
            if (!any_tag) {
                reject("rule1", seq);
                continue;
            }
        }
        bool all_unk = std::all_of(sent.tokens.begin(), sent.tokens.end(),
                                   [](const Token& t) { return t.surface == "[unk]"; });
        if (all_unk) {
            reject("rule2", seq);
            continue;
        }
        bool valid = scheme == TagScheme::TOKEN
                         ? std::all_of(sent.tokens.begin(), sent.tokens.end(),
                                       [&](const Token& t) {
                                           return t.tag == "O" || tagset.count(t.tag) > 0;
                                       })
                         : tags_valid(sent.tags(), scheme);
        if (!valid) {
            reject("rule3", seq);
            continue;
        }
        survivors.push_back({std::move(r.sentence), seq});
    }

    // group by exact word sequence
    std::map<std::vector<std::string>, std::vector<size_t>> groups;
    for (size_t i = 0; i < survivors.size(); ++i)
        groups[survivors[i].sentence.words()].push_back(i);

    std::map<std::vector<std::string>, std::vector<std::string>> gold_tags;
    if (gold)
        for (const auto& s : gold->sentences) gold_tags[s.words()].push_back(join(s.tags()));

    std::vector<bool> drop(survivors.size(), false);
    for (const auto& [words, members] : groups) {
        std::set<std::string> distinct;
        for (size_t i : members) distinct.insert(join(survivors[i].sentence.tags()));
        bool conflict = distinct.size() > 1;
        if (gold && !conflict) {
            auto it = gold_tags.find(words);
            if (it != gold_tags.end())
                for (const auto& gt : it->second)
                    if (gt != *distinct.begin()) conflict = true;
        }
        if (conflict) {
            for (size_t i : members) {
                drop[i] = true;
                reject("rule4", survivors[i].raw);
            }
            continue;
        }
        // duplicates collapse to the first copy; a gold twin counts as the
        // first copy, so a regenerated gold sentence never survives
        std::set<std::string> seen_tags;
        if (gold) {
            auto it = gold_tags.find(words);
            if (it != gold_tags.end()) seen_tags.insert(it->second.begin(), it->second.end());
        }
        for (size_t i : members) {
            std::string key = join(survivors[i].sentence.tags());
            if (!seen_tags.insert(key).second) {
                drop[i] = true;
                reject("rule4", survivors[i].raw);
            }
        }
    }

    std::vector<TaggedSentence> kept;
    for (size_t i = 0; i < survivors.size(); ++i)
        if (!drop[i]) kept.push_back(std::move(survivors[i].sentence));
    report.kept = kept.size();
    return {std::move(kept), report};
}

void write_clean_report(std::ostream& out, const CleanReport& r) {
    out << "input=" << r.input_count() << '\n';
    out << "kept=" << r.kept << '\n';
    for (const auto& [rule, count] : r.rejected) out << "rejected_" << rule << "=" << count << '\n';
    for (const auto& [rule, lines] : r.samples) {
        for (const auto& line : lines) out << "# " << rule << ": " << line << '\n';
    }
}

} // namespace tagaug
