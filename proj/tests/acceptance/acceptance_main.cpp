// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bdparse/bdpt.hpp"
#include "bdparse/cli.hpp"
#include "bdparse/csv.hpp"
#include "bdparse/llm_client.hpp"
#include "bdparse/metrics.hpp"
#include "bdparse/nlpe.hpp"
#include "bdparse/pipeline.hpp"
#include "bdparse/ptmp.hpp"
#include "synthetic_corpus.hpp"
#include "temp_dir.hpp"

using namespace bdparse;
using bdparse::testing::TempDir;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int number;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

struct RunResult {
    PipelineCounters counters;
    ExportResult exported;
    metrics::Scores scores;
};

RunResult run_parser(const testing::SyntheticCorpus& corpus, AblationFlags flags) {
    llm::MockClient client;
    PipelineOptions options;
    options.flags = flags;
    Parser parser(options, Preprocessor(), pos::default_tagger(), &client);
    for (const auto& line : corpus.lines) parser.parse_line(line.content);
    RunResult r;
    r.counters = parser.counters();
    r.exported = parser.export_results();
    std::map<std::uint64_t, std::string> pred;
    for (const auto& rec : r.exported.records) pred.emplace(rec.line_id, rec.template_text);
    r.scores = metrics::evaluate(metrics::align(corpus.truth_by_line(), pred));
    return r;
}

const testing::SyntheticCorpus& corpus() {
    static const auto c = testing::make_synthetic_corpus();
    return c;
}

const RunResult& full_run() {
    static const auto r = run_parser(corpus(), {});
    return r;
}

Outcome two_line_walkthrough() {
    const std::string line1 = "eth0 send 2048 packages";
    const std::string line2 = "eth1 send 1960 packages";

    // The model's answer for the one comparison this scenario triggers.
    Preprocessor pre;
    const auto first = pre.tokenize(line1);
    Template tpl{TemplateId{1}, to_template_tokens(first), first.joined};
    const auto prompt = nlpe::build_prompt(pre.tokenize(line2), tpl);
    TempDir fixtures;
    fixtures.write(llm::prompt_digest(prompt) + ".txt",
                   "Step 3: eth0 and eth1 are both interface names.\nMATCH: <*> send <*> packages\n");

    llm::MockClient client(fixtures.path());
    Parser parser({}, Preprocessor(), pos::default_tagger(), &client);
    const auto r1 = parser.parse_line(line1);
    const auto r2 = parser.parse_line(line2);
    const auto exported = parser.export_results();

    const std::string expected_tree =
        "root\n"
        "  len=4\n"
        "    forward\n"
        "      <*>\n"
        "        send\n"
        "          <*> [group=1]\n"
        "      eth0 [obsolete]\n"
        "        send\n"
        "          <*> [group=0]\n"
        "    reverse\n"
        "      packages\n"
        "        <*>\n"
        "          send [group=1]\n";
    const auto tree = parser.tree().render();

    std::vector<std::string> problems;
    if (!r1 || r1->source != MatchSource::new_template) problems.push_back("line 1 did not create a template");
    if (!r2 || r2->source != MatchSource::bdpt_reverse) problems.push_back("line 2 was not a reverse-branch match");
    if (exported.templates.size() != 1 || exported.templates[0].text != "<*> send <*> packages") {
        problems.push_back("final templates differ");
    }
    for (const auto& rec : exported.records) {
        if (rec.template_text != "<*> send <*> packages") problems.push_back("line " + std::to_string(rec.line_id) + " not corrected");
    }
    if (parser.tree().obsolete_count() != 1) problems.push_back("obsolete nodes: " + std::to_string(parser.tree().obsolete_count()));
    if (tree != expected_tree) problems.push_back("tree rendering differs:\n" + tree);
    if (client.fixture_hits() != 1) problems.push_back("fixture hits: " + std::to_string(client.fixture_hits()));

    if (!problems.empty()) {
        std::string d;
        for (const auto& p : problems) d += (d.empty() ? "" : "; ") + p;
        return {false, d};
    }
    return {true, "1 template, reverse match, 1 obsolete node, tree rendering matches"};
}

Outcome branch_depth_closed_form() {
    for (std::size_t n = 1; n <= 10000; ++n) {
        // Oracle: the smallest depth whose two branches overlap.
        std::size_t m = 1;
        while (2 * m <= n) ++m;
        const auto got = bdpt::branch_depth(n);
        const auto overlap = static_cast<long>(2 * got) - static_cast<long>(n);
        if (got != m || overlap < 1 || overlap > 2) {
            return {false, "N=" + std::to_string(n) + " M=" + std::to_string(got)};
        }
    }
    return {true, "N=1..10000"};
}

Outcome priority_sort_oracle() {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto len = std::uniform_int_distribution<std::size_t>(0, 1000)(rng);
        std::vector<Template> input;
        for (std::size_t i = 0; i < len; ++i) {
            Template t;
            t.id = TemplateId{i + 1};
            t.tokens = {TemplateToken::constant("x")};
            t.updated = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
            t.match_count = std::uniform_int_distribution<std::uint64_t>(1, 6)(rng);
            input.push_back(t);
        }
        // Oracle: insertion sort that moves an element only past strictly greater keys.
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < len; ++i) {
            auto key = [&](std::size_t k) { return std::make_pair(int(input[k].updated), input[k].match_count); };
            auto pos = expected.size();
            while (pos > 0 && key(expected[pos - 1]) > key(i)) --pos;
            expected.insert(expected.begin() + static_cast<long>(pos), i);
        }
        const auto sorted = ptmp::sort_by_priority(input);
        if (sorted.size() != len) return {false, "size changed in trial " + std::to_string(trial)};
        for (std::size_t k = 0; k < len; ++k) {
            if (sorted[k].id != input[expected[k]].id) return {false, "order differs in trial " + std::to_string(trial)};
        }
    }
    return {true, "1000 random lists"};
}

struct OracleScores {
    double ga, pa, fga, fta;
};

OracleScores brute_force_metrics(const std::vector<std::string>& truth, const std::vector<std::string>& pred) {
    const auto n = truth.size();
    auto group_of = [&](const std::vector<std::string>& labels, std::size_t i) {
        std::set<std::size_t> g;
        for (std::size_t j = 0; j < n; ++j)
            if (labels[j] == labels[i]) g.insert(j);
        return g;
    };
    double ga = 0, pa = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (group_of(truth, i) == group_of(pred, i)) ga += 1;
        if (truth[i] == pred[i]) pa += 1;
    }
    std::set<std::set<std::size_t>> truth_groups, pred_groups;
    for (std::size_t i = 0; i < n; ++i) {
        truth_groups.insert(group_of(truth, i));
        pred_groups.insert(group_of(pred, i));
    }
    double grouped = 0, templated = 0;
    for (const auto& g : pred_groups) {
        if (!truth_groups.contains(g)) continue;
        grouped += 1;
        const auto i = *g.begin();
        if (pred[i] == truth[i]) templated += 1;
    }
    auto f1 = [&](double correct) {
        if (correct == 0) return 0.0;
        const double p = correct / double(pred_groups.size());
        const double r = correct / double(truth_groups.size());
        return 2 * p * r / (p + r);
    };
    return {ga / double(n), pa / double(n), f1(grouped), f1(templated)};
}

Outcome metrics_oracle() {
    std::mt19937_64 rng(5);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int lines = uni(1, 50);
        const int groups = uni(1, 8);
        std::vector<int> mode(groups);
        for (auto& m : mode) m = uni(0, 3);  // 0 exact, 1 exact with wrong text, 2 split, 3 merged
        std::vector<std::string> truth, pred;
        std::map<std::uint64_t, std::string> truth_map, pred_map;
        for (int i = 0; i < lines; ++i) {
            const int g = uni(0, groups - 1);
            truth.push_back("T" + std::to_string(g) + " <*> done");
            switch (mode[g]) {
                case 0: pred.push_back(truth.back()); break;
                case 1: pred.push_back("P" + std::to_string(g) + " <*> <*>"); break;
                case 2: pred.push_back("S" + std::to_string(g) + "-" + std::to_string(uni(0, 1))); break;
                default: pred.push_back("M" + std::to_string(g % 2)); break;
            }
            truth_map.emplace(i + 1, truth.back());
            pred_map.emplace(i + 1, pred.back());
        }
        const auto got = metrics::evaluate(metrics::align(truth_map, pred_map));
        const auto want = brute_force_metrics(truth, pred);
        for (auto [a, b] : {std::pair{got.ga, want.ga}, {got.pa, want.pa}, {got.fga, want.fga}, {got.fta, want.fta}}) {
            worst = std::max(worst, std::abs(a - b));
        }
        if (worst > 1e-12) return {false, "trial " + std::to_string(trial) + " deviates by " + std::to_string(worst)};
        if (got.fta > got.fga) return {false, "FTA > FGA in trial " + std::to_string(trial)};
    }
    std::ostringstream d;
    d << "200 corpora, max deviation " << worst;
    return {true, d.str()};
}

Outcome synthetic_end_to_end() {
    const auto& c = corpus();
    TempDir dir;
    std::string text;
    for (const auto& line : c.lines) text += line.content + "\n";
    const auto input = dir.write("synthetic.log", text);

    std::vector<std::string> outputs[2];
    for (int run = 0; run < 2; ++run) {
        cli::ParseCommand cmd;
        cmd.input = input;
        cmd.out_dir = dir / ("run" + std::to_string(run));
        std::ostringstream out, err;
        if (cli::cmd_parse(cmd, out, err) != 0) return {false, "parse failed: " + err.str()};
        for (const char* suffix : {"_structured.csv", "_templates.csv", "_stats.json"}) {
            outputs[run].push_back(testing::read_file(cmd.out_dir / (std::string("synthetic") + suffix)));
        }
    }
    if (outputs[0] != outputs[1]) return {false, "outputs differ between runs"};

    std::istringstream structured(outputs[0][0]);
    const auto table = csv::read_table(structured);
    const auto id_col = table.column("LineId");
    const auto tpl_col = table.column("EventTemplate");
    std::map<std::uint64_t, std::string> pred;
    for (const auto& row : table.rows) pred.emplace(std::stoull(row[*id_col]), row[*tpl_col]);
    const auto s = metrics::evaluate(metrics::align(c.truth_by_line(), pred));

    const bool pass = s.ga >= 0.95 && s.pa >= 0.90;
    return {pass, "GA " + fmt(s.ga) + " (>= 0.95), PA " + fmt(s.pa) + " (>= 0.90), FGA " + fmt(s.fga) + ", FTA " +
                      fmt(s.fta) + ", byte-identical reruns"};
}

Outcome ablation_directions() {
    const auto& full = full_run();
    AblationFlags no_pos;
    no_pos.disable_pos = true;
    AblationFlags no_nlpe;
    no_nlpe.disable_nlpe = true;
    AblationFlags no_ptmp;
    no_ptmp.disable_ptmp = true;
    const auto a = run_parser(corpus(), no_pos);
    const auto b = run_parser(corpus(), no_nlpe);
    const auto d = run_parser(corpus(), no_ptmp);

    const bool pos_ok = a.counters.llm_calls > full.counters.llm_calls;
    const bool nlpe_ok = b.counters.llm_calls == 0 && b.scores.ga < full.scores.ga;
    const bool ptmp_ok = d.counters.new_templates >= full.counters.new_templates;
    std::ostringstream s;
    s << "w/o POS llm_calls " << a.counters.llm_calls << " vs " << full.counters.llm_calls << (pos_ok ? "" : " [x]")
      << "; w/o NLPE llm_calls " << b.counters.llm_calls << ", GA " << fmt(b.scores.ga) << " vs "
      << fmt(full.scores.ga) << (nlpe_ok ? "" : " [x]") << "; w/o PTMP new " << d.counters.new_templates << " vs "
      << full.counters.new_templates << (ptmp_ok ? "" : " [x]");
    return {pos_ok && nlpe_ok && ptmp_ok, s.str()};
}

Outcome llm_frugality() {
    const auto& full = full_run();
    const auto limit = 2 * corpus().truth_templates.size();
    return {full.counters.llm_calls <= limit,
            std::to_string(full.counters.llm_calls) + " calls (<= " + std::to_string(limit) + ")"};
}

Outcome throughput_floor() {
    const auto contents = corpus().contents();
    constexpr std::size_t kTarget = 100000;
    PipelineOptions options;
    options.flags.disable_nlpe = true;
    Parser parser(options, Preprocessor(), pos::default_tagger(), nullptr);
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < kTarget; ++i) parser.parse_line(contents[i % contents.size()]);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double rate = double(kTarget) / secs;
    return {rate >= 5000.0, fmt(rate, 0) + " lines/s over " + std::to_string(kTarget) + " lines (>= 5000)"};
}

Outcome self_correction_convergence() {
    const auto& first = full_run();
    std::vector<std::string> seeds;
    for (const auto& t : first.exported.templates) seeds.push_back(t.text);

    llm::MockClient client;
    Parser parser({}, Preprocessor(), pos::default_tagger(), &client);
    parser.seed_templates(seeds);
    for (const auto& line : corpus().lines) parser.parse_line(line.content);
    const auto fresh = parser.counters().new_templates;
    return {fresh == 0, std::to_string(fresh) + " new templates on replay with " + std::to_string(seeds.size()) + " seeds"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "two-line walkthrough with branch obsoletion", 1.0, two_line_walkthrough},
        {2, "branch depth closed form and overlap", 1.0, branch_depth_closed_form},
        {3, "priority sort matches oracle", 5.0, priority_sort_oracle},
        {4, "metrics match brute-force oracles", 10.0, metrics_oracle},
        {5, "synthetic corpus accuracy and determinism", 30.0, synthetic_end_to_end},
        {6, "ablation directions", 120.0, ablation_directions},
        {7, "model call frugality", 30.0, llm_frugality},
        {8, "throughput floor without NLPE", 60.0, throughput_floor},
        {9, "self-correction convergence", 30.0, self_correction_convergence},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.pass && in_time;
        if (!pass) ++failures;
        std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.number << ": " << c.name << " - " << o.detail
                  << " [" << fmt(secs, 3) << "s, budget " << fmt(c.budget_seconds, 0) << "s"
                  << (in_time ? "" : ", over budget") << "]\n";
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
