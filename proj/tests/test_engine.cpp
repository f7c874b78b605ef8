#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "nxsift/bench.hpp"
#include "nxsift/dga_sim.hpp"
#include "nxsift/engine.hpp"
#include "nxsift/rng.hpp"

using namespace nxsift;

namespace {

const UnigramLexicon& bundled_lexicon() {
    static UnigramLexicon lex =
        UnigramLexicon::from_file(std::string(NXSIFT_DATA_DIR) + "/lexicon.txt");
    return lex;
}

const SuffixList& bundled_suffixes() {
    static SuffixList s =
        SuffixList::from_file(std::string(NXSIFT_DATA_DIR) + "/suffixes.txt");
    return s;
}

EngineConfig filters_only_config() {
    EngineConfig cfg;
    cfg.classifier_enabled = false;
    return cfg;
}

DetectionEngine make_engine(EngineConfig cfg) {
    EngineModels models;
    models.lexicon = &bundled_lexicon();
    return DetectionEngine(cfg, models);
}

DomainRecord rec_of(const std::string& host, int64_t ts, const std::string& qname) {
    DomainRecord rec;
    REQUIRE(make_record(host, ts, qname, bundled_suffixes(), true, rec) == ParseStatus::ok);
    return rec;
}

std::vector<Alert> feed(DetectionEngine& engine, const std::string& host,
                        const std::vector<std::string>& qnames, int64_t t0 = 0) {
    std::vector<Alert> all;
    int64_t ts = t0;
    for (const auto& q : qnames) {
        for (auto& a : engine.observe(rec_of(host, ts++, q))) all.push_back(std::move(a));
    }
    return all;
}

}  // namespace

TEST_CASE("word filter trips on the shared word at threshold two") {
    EngineConfig cfg = filters_only_config();
    cfg.word_strike_threshold = 2;
    DetectionEngine engine = make_engine(cfg);
    const auto first = engine.observe(rec_of("h1", 0, "aboveshare.net"));
    CHECK(first.empty());
    const auto second = engine.observe(rec_of("h1", 1, "alreadyshare.net"));
    REQUIRE(second.size() == 1);
    CHECK(second[0].filter == FilterKind::word);
    CHECK(second[0].evidence == std::vector<std::string>{"share"});
    CHECK(second[0].domains_seen == 2);
}

TEST_CASE("a single benign record raises nothing") {
    DetectionEngine engine = make_engine(filters_only_config());
    CHECK(engine.observe(rec_of("h1", 0, "google.com")).empty());
}

TEST_CASE("short words are not counted") {
    EngineConfig cfg = filters_only_config();
    cfg.word_strike_threshold = 2;
    DetectionEngine engine = make_engine(cfg);
    // "the" is three letters, below the exclusive bound
    const auto alerts = feed(engine, "h1", {"thecat7.com", "thedog7.com", "thefox7.com"});
    for (const auto& a : alerts) {
        for (const auto& w : a.evidence) CHECK(w != "the");
    }
}

TEST_CASE("word alerts deduplicate within an epoch and return after it") {
    EngineConfig cfg = filters_only_config();
    cfg.word_strike_threshold = 2;
    cfg.epoch_seconds = 100;
    DetectionEngine engine = make_engine(cfg);
    auto alerts = feed(engine, "h1", {"aboveshare.net", "alreadyshare.net",
                                      "possibleshare.net", "mountainshare.net"});
    CHECK(alerts.size() == 1);  // second trip of "share" suppressed
    // past the epoch the state is wiped and the filter can fire again
    auto later = feed(engine, "h1", {"aboveshare.net", "alreadyshare.net"}, 500);
    REQUIRE(later.size() == 1);
    CHECK(later[0].filter == FilterKind::word);
}

TEST_CASE("check_pattern criteria") {
    auto entry = [](const std::string& sld, const std::string& tld, int words,
                    int short_words) {
        HostState::WindowEntry e;
        e.sld = sld;
        e.tld = tld;
        e.word_count = words;
        e.short_word_count = short_words;
        return e;
    };
    SUBCASE("matsnu-style lengths satisfy only the length criterion") {
        std::deque<HostState::WindowEntry> window;
        for (const auto* sld :
             {"starsendbottomhabitshake", "causeirongroundnettellstart",
              "cultureexploredogdistrict", "sizeprogrambillsaypointpot",
              "tourmentionboneconcertadmire"}) {
            window.push_back(entry(sld, "com", 0, 0));
        }
        // word counts vary and one sits at 2, so only C1 can hold
        int w = 1;
        for (auto& e : window) e.word_count = ++w;
        const std::vector<int> crits = check_pattern(window, 5, 10);
        CHECK(crits == std::vector<int>{1});
    }
    SUBCASE("same sld across distinct tlds") {
        std::deque<HostState::WindowEntry> window;
        for (const auto* tld : {"com", "org", "net", "biz", "info"})
            window.push_back(entry("backdates0", tld, 1, 0));
        const std::vector<int> crits = check_pattern(window, 5, 10);
        CHECK(std::find(crits.begin(), crits.end(), 5) != crits.end());
        CHECK(std::find(crits.begin(), crits.end(), 2) != crits.end());  // equal counts
    }
    SUBCASE("repeated tlds break criterion five") {
        std::deque<HostState::WindowEntry> window;
        for (const auto* tld : {"com", "org", "net", "biz", "com"})
            window.push_back(entry("backdates0", tld, 1, 0));
        const std::vector<int> crits = check_pattern(window, 5, 10);
        CHECK(std::find(crits.begin(), crits.end(), 5) == crits.end());
    }
    SUBCASE("short benign mix satisfies nothing") {
        std::deque<HostState::WindowEntry> window;
        window.push_back(entry("qq", "com", 1, 1));
        window.push_back(entry("tmall", "com", 1, 0));
        window.push_back(entry("baidu", "com", 2, 2));
        window.push_back(entry("bing", "com", 1, 0));
        window.push_back(entry("yelp", "com", 3, 3));
        CHECK(check_pattern(window, 5, 10).empty());
    }
    SUBCASE("partial window is an error") {
        std::deque<HostState::WindowEntry> window;
        window.push_back(entry("a", "com", 1, 1));
        CHECK_THROWS_AS(check_pattern(window, 5, 10), std::invalid_argument);
    }
}

TEST_CASE("pattern filter over a replay") {
    EngineConfig cfg = filters_only_config();
    DetectionEngine engine = make_engine(cfg);
    // every window of these satisfies C1 (all lengths > 10); the counter
    // reaches 5 on the 9th record
    std::vector<std::string> qnames;
    for (int i = 0; i < 12; ++i)
        qnames.push_back("starsendbottomhabitshake" + std::to_string(i) + ".com");
    int64_t ts = 0;
    int alert_at = -1;
    for (const auto& q : qnames) {
        const auto alerts = engine.observe(rec_of("h1", ts, q));
        for (const auto& a : alerts) {
            if (a.filter == FilterKind::pattern && alert_at < 0)
                alert_at = static_cast<int>(ts) + 1;
        }
        ++ts;
    }
    CHECK(alert_at == 9);
}

TEST_CASE("hosts that never fill a window cannot pattern-alert") {
    EngineConfig cfg = filters_only_config();
    DetectionEngine engine = make_engine(cfg);
    const auto alerts = feed(engine, "h1",
                             {"starsendbottomhabitshake.com", "causeirongroundnettell.com",
                              "cultureexploredogdistrict.com", "sizeprogrambillsaypoint.com"});
    for (const auto& a : alerts) CHECK(a.filter != FilterKind::pattern);
}

TEST_CASE("prune") {
    HostState state;
    state.word_buckets["share"] = {2, 100};
    state.word_buckets["old"] = {5, 10};
    state.pattern_counter = {3, 100};
    state.window.push_back({"a", "com", 10, 1, 0});
    state.window.push_back({"b", "com", 100, 1, 0});
    state.alerts_raised[FilterKind::word] = 10;

    SUBCASE("fresh entries survive") {
        HostState copy = state;
        DetectionEngine::prune(copy, 100, 1000);
        CHECK(copy.word_buckets.size() == 2);
        CHECK(copy.window.size() == 2);
        CHECK(copy.pattern_counter.count == 3);
    }
    SUBCASE("stale entries are wiped") {
        HostState copy = state;
        DetectionEngine::prune(copy, 5000, 100);
        CHECK(copy.word_buckets.empty());
        CHECK(copy.window.empty());
        CHECK(copy.pattern_counter.count == 0);
        CHECK(copy.alerts_raised.empty());
    }
    SUBCASE("partial expiry and idempotence") {
        HostState copy = state;
        DetectionEngine::prune(copy, 160, 100);  // cutoff 60
        CHECK(copy.word_buckets.count("share") == 1);
        CHECK(copy.word_buckets.count("old") == 0);
        CHECK(copy.window.size() == 1);
        CHECK(copy.alerts_raised.empty());
        HostState again = copy;
        DetectionEngine::prune(again, 160, 100);
        CHECK(again.word_buckets.size() == copy.word_buckets.size());
        CHECK(again.window.size() == copy.window.size());
        CHECK(again.pattern_counter.count == copy.pattern_counter.count);
    }
}

TEST_CASE("a pruned counter restarts from zero") {
    EngineConfig cfg = filters_only_config();
    cfg.word_strike_threshold = 3;
    cfg.epoch_seconds = 50;
    DetectionEngine engine = make_engine(cfg);
    CHECK(engine.observe(rec_of("h1", 0, "aboveshare.net")).empty());
    CHECK(engine.observe(rec_of("h1", 10, "alreadyshare.net")).empty());
    // the two strikes above expire before the third occurrence
    CHECK(engine.observe(rec_of("h1", 200, "possibleshare.net")).empty());
    CHECK(engine.observe(rec_of("h1", 201, "mountainshare.net")).empty());
    const auto alerts = engine.observe(rec_of("h1", 202, "windowshare.net"));
    REQUIRE(alerts.size() == 1);
    CHECK(alerts[0].evidence == std::vector<std::string>{"share"});
}

TEST_CASE("pigeonhole bound on adversarial orderings") {
    // any ordering of records over d distinct counted words alerts by
    // record (t-1)*d + 1
    const std::vector<std::string> words = {"mountain", "possible", "window", "culture"};
    for (int t : {2, 3, 5}) {
        EngineConfig cfg = filters_only_config();
        cfg.word_strike_threshold = t;
        cfg.epoch_seconds = 1 << 20;
        DetectionEngine engine = make_engine(cfg);
        // worst case: round-robin keeps every bucket one below the
        // threshold for as long as possible; each record carries exactly
        // one counted word
        std::vector<std::string> qnames;
        for (int round = 0; round < t; ++round)
            for (const auto& w : words) qnames.push_back(w + "7.net");
        int64_t ts = 0;
        int first_alert = -1;
        for (const auto& q : qnames) {
            const auto alerts = engine.observe(rec_of("adv", ts, q));
            ++ts;
            if (first_alert < 0) {
                for (const auto& a : alerts)
                    if (a.filter == FilterKind::word) first_alert = static_cast<int>(ts);
            }
        }
        REQUIRE(first_alert > 0);
        const int bound = (t - 1) * static_cast<int>(words.size()) + 1;
        CHECK(first_alert <= bound);
        CHECK(first_alert == bound);  // round-robin achieves the bound exactly
    }
}

TEST_CASE("host isolation: interleaving changes nothing") {
    const std::vector<std::string> stream_a = {"aboveshare.net", "alreadyshare.net",
                                               "possibleshare.net"};
    const std::vector<std::string> stream_b = {"mountainshare.net", "windowshare.net",
                                               "actionprobable.net"};
    EngineConfig cfg = filters_only_config();
    cfg.word_strike_threshold = 2;

    auto run_solo = [&](const std::vector<std::string>& stream) {
        DetectionEngine engine = make_engine(cfg);
        return feed(engine, "solo", stream);
    };
    const auto solo_a = run_solo(stream_a);
    const auto solo_b = run_solo(stream_b);

    DetectionEngine engine = make_engine(cfg);
    std::vector<Alert> inter_a, inter_b;
    int64_t ts = 0;
    for (size_t i = 0; i < stream_a.size(); ++i) {
        for (auto& a : engine.observe(rec_of("ha", ts++, stream_a[i]))) inter_a.push_back(a);
        for (auto& b : engine.observe(rec_of("hb", ts++, stream_b[i]))) inter_b.push_back(b);
    }
    REQUIRE(inter_a.size() == solo_a.size());
    REQUIRE(inter_b.size() == solo_b.size());
    for (size_t i = 0; i < solo_a.size(); ++i) {
        CHECK(inter_a[i].filter == solo_a[i].filter);
        CHECK(inter_a[i].evidence == solo_a[i].evidence);
        CHECK(inter_a[i].domains_seen == solo_a[i].domains_seen);
    }
}

TEST_CASE("whitelisted slds are ignored entirely") {
    EngineConfig cfg = filters_only_config();
    cfg.word_strike_threshold = 2;
    DetectionEngine engine = make_engine(cfg);
    engine.add_whitelisted("aboveshare");
    CHECK(engine.observe(rec_of("h1", 0, "aboveshare.net")).empty());
    CHECK(engine.observe(rec_of("h1", 1, "aboveshare.net")).empty());
    CHECK(engine.observe(rec_of("h1", 2, "aboveshare.net")).empty());
    const HostState* state = engine.host("h1");
    CHECK(state == nullptr);  // never materialized
}

TEST_CASE("config file round trip") {
    const std::string path = "/tmp/nxsift_test_config.txt";
    {
        std::ofstream out(path);
        out << "# engine settings\n";
        out << "word_strike_threshold = 4\n";
        out << "pattern_strike_threshold=7\n";
        out << "epoch_seconds = 3600\n";
        out << "classifier_enabled = false\n";
        out << "long_domain_len = 12\n";
    }
    const EngineConfig cfg = EngineConfig::from_file(path);
    CHECK(cfg.word_strike_threshold == 4);
    CHECK(cfg.pattern_strike_threshold == 7);
    CHECK(cfg.epoch_seconds == 3600);
    CHECK(cfg.classifier_enabled == false);
    CHECK(cfg.long_domain_len == 12);
    CHECK(cfg.window_size == 5);  // untouched default
    std::remove(path.c_str());

    EngineConfig bad;
    bad.word_strike_threshold = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("benign replay trips the word filter far later than an AGD stream") {
    const auto& lex = bundled_lexicon();
    const auto& suffixes = bundled_suffixes();
    EngineConfig cfg = filters_only_config();

    const GeneratedCorpus agd = generate(family_template("suppobox", lex, 41), 1000, true);
    std::vector<std::string> agd_qnames;
    for (const auto& rec : agd.records) agd_qnames.push_back(rec.qname);

    std::vector<std::string> benign_pool;
    {
        std::ifstream in(std::string(NXSIFT_DATA_DIR) + "/benign_slds.txt");
        REQUIRE(in.good());
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) benign_pool.push_back(line);
    }
    std::vector<std::string> benign_qnames;
    for (const auto& rec : sample_benign(benign_pool, 1000, 42).records)
        benign_qnames.push_back(rec.qname);

    const ShuffleBenchResult agd_r =
        shuffle_bench(agd_qnames, "agd", suffixes, lex, cfg, 3, 200, 7);
    const ShuffleBenchResult benign_r =
        shuffle_bench(benign_qnames, "benign", suffixes, lex, cfg, 3, 200, 7);
    CHECK(mean_of(benign_r.first_word_alert) >= 2.0 * mean_of(agd_r.first_word_alert));
}

TEST_CASE("state stays bounded by the epoch under a long replay") {
    EngineConfig cfg = filters_only_config();
    cfg.epoch_seconds = 1000;
    DetectionEngine engine = make_engine(cfg);
    const auto& lex = bundled_lexicon();
    const GeneratedCorpus corpus = generate(family_template("rovnix", lex, 13), 4000, true);
    Rng rng(3);
    size_t max_buckets = 0;
    for (int i = 0; i < 50000; ++i) {
        const auto& rec = corpus.records[rng.next_below(corpus.records.size())];
        engine.observe(rec_of("h1", i, rec.qname));
        if (i % 5000 == 0 && engine.host("h1"))
            max_buckets = std::max(max_buckets, engine.host("h1")->word_buckets.size());
    }
    const HostState* state = engine.host("h1");
    REQUIRE(state != nullptr);
    // an epoch holds 1000 records of at most ~6 counted words each; the
    // 50k-record replay must not accumulate beyond that
    CHECK(state->word_buckets.size() < 6000);
    CHECK(max_buckets < 6000);
    CHECK(state->window.size() <= 5);
    CHECK(engine.host_count() == 1);
}

TEST_CASE("engine requires models when the classifier is on") {
    EngineConfig cfg;
    cfg.classifier_enabled = true;
    EngineModels models;
    models.lexicon = &bundled_lexicon();
    CHECK_THROWS_AS(DetectionEngine(cfg, models), std::invalid_argument);
}
